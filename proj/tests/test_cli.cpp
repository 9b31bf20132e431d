#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kCli = NESTDIAG_CLI_PATH;

int run_cli(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("nestdiag-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

}  // namespace

TEST_CASE("cli run writes artifacts and honors the exit contract") {
    TempDir tmp;
    const std::string outdir = (tmp.path / "out").string();
    const int code = run_cli("run --problem gauss-4 --live 50 --nsteps 4 "
                             "--seed 1 --outdir " + outdir);
    CHECK((code == 0 || code == 2));

    const fs::path run_dir = fs::path(outdir) / "gauss-4_K50_M4_seed1";
    CHECK(fs::exists(run_dir / "trace.csv"));
    CHECK(fs::exists(run_dir / "histogram.csv"));
    CHECK(fs::exists(run_dir / "summary.json"));

    SUBCASE("identical flags reproduce the trace bytes") {
        const std::string outdir2 = (tmp.path / "out2").string();
        const int code2 = run_cli("run --problem gauss-4 --live 50 --nsteps 4 "
                                  "--seed 1 --outdir " + outdir2);
        CHECK(code2 == code);
        CHECK(slurp(run_dir / "trace.csv") ==
              slurp(fs::path(outdir2) / "gauss-4_K50_M4_seed1" / "trace.csv"));
    }

    SUBCASE("check recomputes the verdict from the trace alone") {
        const int check_code =
            run_cli("check --trace " + (run_dir / "trace.csv").string());
        CHECK(check_code == code);
    }
}

TEST_CASE("cli rejects unknown problems before sampling") {
    TempDir tmp;
    CHECK(run_cli("run --problem nosuch --nsteps 4 --outdir " +
                  (tmp.path / "x").string()) == 1);
}

TEST_CASE("cli check failure modes") {
    TempDir tmp;
    CHECK(run_cli("check --trace " + (tmp.path / "missing.csv").string()) == 1);

    const fs::path bad = tmp.path / "bad.csv";
    std::ofstream(bad) << "problem,num_live,num_steps,seed,iter,logl,logv,logw,"
                          "insertion_rank,jd,r,rjd\ngarbage\n";
    CHECK(run_cli("check --trace " + bad.string()) == 1);

    // Synthetic trace with every rjd at 0.5: rerun recommended.
    const fs::path weak = tmp.path / "weak.csv";
    {
        std::ofstream out(weak);
        out << "problem,num_live,num_steps,seed,iter,logl,logv,logw,"
               "insertion_rank,jd,r,rjd\n";
        for (int i = 0; i < 100; ++i)
            out << "x,10,2,1," << i << ",1,-1,0," << i % 10 << ",0.5,1,0.5\n";
    }
    CHECK(run_cli("check --trace " + weak.string()) == 2);
}

TEST_CASE("cli sequence produces a table and recommendation") {
    TempDir tmp;
    const std::string outdir = (tmp.path / "seq").string();
    const int code = run_cli("sequence --problem gauss-4 --live 50 --rounds 2 "
                             "--seed 3 --outdir " + outdir);
    CHECK((code == 0 || code == 2));
    const fs::path table =
        fs::path(outdir) / "gauss-4_K50_sequence_seed3" / "sequence.csv";
    REQUIRE(fs::exists(table));
    const std::string text = slurp(table);
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 3);  // header + two schedule points
    CHECK(fs::exists(fs::path(outdir) / "gauss-4_K50_M4_seed3" / "trace.csv"));
    CHECK(fs::exists(fs::path(outdir) / "gauss-4_K50_M8_seed4" / "trace.csv"));
}

TEST_CASE("cli radius scaling table") {
    TempDir tmp;
    const fs::path out = tmp.path / "scaling.csv";
    CHECK(run_cli("radius-scaling --dims 2 --live-counts 50 --repeats 1 "
                  "--out " + out.string()) == 0);
    std::ifstream in(out);
    std::string header, row;
    REQUIRE(std::getline(in, header));
    CHECK(header == "num_live,dim,repeats,mean_r,std_r,predicted_r");
    REQUIRE(std::getline(in, row));
    // One repeat: the standard deviation column is zero.
    std::stringstream fields(row);
    std::string field;
    std::vector<std::string> cols;
    while (std::getline(fields, field, ',')) cols.push_back(field);
    REQUIRE(cols.size() == 6);
    CHECK(std::stod(cols[4]) == 0.0);
}
