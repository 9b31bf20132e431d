#include "nestdiag/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace nestdiag {

namespace {

constexpr const char* kTraceHeader =
    "problem,num_live,num_steps,seed,iter,logl,logv,logw,insertion_rank,jd,r,"
    "rjd";

double parse_double(const std::string& token, std::size_t line) {
    // from_chars does not accept "inf"/"nan" spellings everywhere; handle
    // them first so the trace stays round-trip safe.
    if (token == "inf") return std::numeric_limits<double>::infinity();
    if (token == "-inf") return -std::numeric_limits<double>::infinity();
    if (token == "nan" || token == "-nan")
        return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError("bad numeric field '" + token + "'", line);
    return value;
}

long parse_long(const std::string& token, std::size_t line) {
    long value = 0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError("bad integer field '" + token + "'", line);
    return value;
}

std::uint64_t parse_u64(const std::string& token, std::size_t line) {
    std::uint64_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError("bad integer field '" + token + "'", line);
    return value;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof(buf), value,
                      std::chars_format::general, 17);
    (void)ec;
    return std::string(buf, ptr);
}

std::size_t write_trace(const RunResult& result, std::ostream& sink) {
    std::size_t written = 0;
    const auto ensure = [&] {
        if (!sink)
            throw IoError("write_trace: sink failed after " +
                              std::to_string(written) + " records",
                          written);
    };
    sink << kTraceHeader << '\n';
    ensure();
    for (const auto& rec : result.records) {
        sink << result.problem_name << ',' << result.num_live << ','
             << result.num_steps << ',' << result.seed << ',' << rec.iter << ','
             << format_double(rec.logl) << ',' << format_double(rec.logv) << ','
             << format_double(rec.logw) << ',' << rec.insertion_rank << ','
             << format_double(rec.jd) << ',' << format_double(rec.r) << ','
             << format_double(rec.rjd) << '\n';
        ensure();
        ++written;
    }
    sink.flush();
    ensure();
    return written;
}

std::size_t write_trace_jsonl(const RunResult& result, std::ostream& sink) {
    std::size_t written = 0;
    const auto number = [](double v) {
        return std::isfinite(v) ? format_double(v) : std::string("null");
    };
    for (const auto& rec : result.records) {
        sink << "{\"problem\":\"" << result.problem_name
             << "\",\"num_live\":" << result.num_live
             << ",\"num_steps\":" << result.num_steps
             << ",\"seed\":" << result.seed << ",\"iter\":" << rec.iter
             << ",\"logl\":" << number(rec.logl)
             << ",\"logv\":" << number(rec.logv)
             << ",\"logw\":" << number(rec.logw)
             << ",\"insertion_rank\":" << rec.insertion_rank
             << ",\"jd\":" << number(rec.jd) << ",\"r\":" << number(rec.r)
             << ",\"rjd\":" << number(rec.rjd) << "}\n";
        if (!sink)
            throw IoError("write_trace_jsonl: sink failed after " +
                              std::to_string(written) + " records",
                          written);
        ++written;
    }
    sink.flush();
    return written;
}

TraceData read_trace(std::istream& source) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(source, line))
        throw ParseError("empty trace", lineno);
    if (line != kTraceHeader)
        throw ParseError("unexpected trace header", lineno);

    TraceData data;
    bool have_meta = false;
    while (std::getline(source, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 12)
            throw ParseError("expected 12 fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        const int num_live = static_cast<int>(parse_long(fields[1], lineno));
        const int num_steps = static_cast<int>(parse_long(fields[2], lineno));
        const std::uint64_t seed = parse_u64(fields[3], lineno);
        if (!have_meta) {
            data.problem_name = fields[0];
            data.num_live = num_live;
            data.num_steps = num_steps;
            data.seed = seed;
            have_meta = true;
        } else if (fields[0] != data.problem_name ||
                   num_live != data.num_live || num_steps != data.num_steps ||
                   seed != data.seed) {
            throw ParseError("run metadata changed mid-trace", lineno);
        }
        IterationRecord rec;
        rec.iter = parse_long(fields[4], lineno);
        rec.logl = parse_double(fields[5], lineno);
        rec.logv = parse_double(fields[6], lineno);
        rec.logw = parse_double(fields[7], lineno);
        rec.insertion_rank =
            static_cast<int>(parse_long(fields[8], lineno));
        rec.jd = parse_double(fields[9], lineno);
        rec.r = parse_double(fields[10], lineno);
        rec.rjd = parse_double(fields[11], lineno);
        data.records.push_back(rec);
    }
    return data;
}

SequenceTable make_sequence_table(const std::vector<RunResult>& runs) {
    if (runs.empty())
        throw PreconditionError("make_sequence_table: no runs");
    SequenceTable table;
    table.problem_name = runs.front().problem_name;
    table.num_live = runs.front().num_live;
    for (const auto& run : runs) {
        if (run.problem_name != table.problem_name)
            throw PreconditionError(
                "make_sequence_table: runs mix problems ('" +
                table.problem_name + "' vs '" + run.problem_name + "')");
        if (run.num_live != table.num_live)
            throw PreconditionError(
                "make_sequence_table: runs mix live-point counts");
        SequenceRow row;
        row.num_steps = run.num_steps;
        row.logz = run.logz;
        row.logz_err = run.logz_err;
        row.geometric_mean_rjd = run.summary.geometric_mean_rjd;
        row.frac_rjd_above_1 = run.summary.frac_rjd_above_1;
        row.ks_p_value =
            run.records.empty()
                ? 1.0
                : insertion_order_ks(run.records, run.num_live).p_value;
        row.wall_time_s = run.wall_time_s;
        table.rows.push_back(row);
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const SequenceRow& a, const SequenceRow& b) {
                  return a.num_steps < b.num_steps;
              });
    return table;
}

void write_sequence_table(const SequenceTable& table, std::ostream& sink) {
    sink << "num_steps,logz,logz_err,geometric_mean_rjd,frac_rjd_above_1,"
            "ks_p_value,wall_time_s\n";
    for (const auto& row : table.rows) {
        sink << row.num_steps << ',' << format_double(row.logz) << ','
             << format_double(row.logz_err) << ','
             << format_double(row.geometric_mean_rjd) << ','
             << format_double(row.frac_rjd_above_1) << ','
             << format_double(row.ks_p_value) << ','
             << format_double(row.wall_time_s) << '\n';
    }
}

void write_histogram(const std::vector<IterationRecord>& records,
                     int bins_per_decade, std::ostream& sink) {
    const RjdHistogram hist = rjd_histogram(records, bins_per_decade);
    sink << "bin_low,bin_high,count\n";
    for (const auto& bin : hist.bins)
        sink << format_double(bin.lo) << ',' << format_double(bin.hi) << ','
             << bin.count << '\n';
}

}  // namespace nestdiag
