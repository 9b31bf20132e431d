#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "nestdiag/diagnostics.hpp"
#include "nestdiag/engine.hpp"

namespace nestdiag {

class IoError : public Error {
public:
    IoError(const std::string& what, std::size_t records_written)
        : Error(what), records_written(records_written) {}
    std::size_t records_written;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line(line) {}
    std::size_t line;
};

/// Run trace parsed back from its serialized form.
struct TraceData {
    std::string problem_name;
    int num_live = 0;
    int num_steps = 0;
    std::uint64_t seed = 0;
    std::vector<IterationRecord> records;
};

/// One row of the doubling-schedule comparison table.
struct SequenceRow {
    int num_steps = 0;
    double logz = 0.0;
    double logz_err = 0.0;
    double geometric_mean_rjd = 0.0;
    double frac_rjd_above_1 = 0.0;
    double ks_p_value = 0.0;
    double wall_time_s = 0.0;
};

struct SequenceTable {
    std::string problem_name;
    int num_live = 0;
    std::vector<SequenceRow> rows;
};

/// Locale-independent decimal rendering at 17 significant digits;
/// round-trips every finite double exactly.
std::string format_double(double value);

/// CSV trace: a header line, then one line per record with the run
/// metadata repeated on each row. Returns the number of records written;
/// stream failures throw IoError carrying the partial count.
std::size_t write_trace(const RunResult& result, std::ostream& sink);

/// Same trace as one JSON object per line. Non-finite values are emitted
/// as null; the CSV form is the canonical round-trip format.
std::size_t write_trace_jsonl(const RunResult& result, std::ostream& sink);

TraceData read_trace(std::istream& source);

/// Build the per-M comparison table from a sequence of runs over the same
/// problem and live-point count, sorted by ascending num_steps.
SequenceTable make_sequence_table(const std::vector<RunResult>& runs);

void write_sequence_table(const SequenceTable& table, std::ostream& sink);

/// Plot-ready (bin_low, bin_high, count) rows of the RJD histogram.
void write_histogram(const std::vector<IterationRecord>& records,
                     int bins_per_decade, std::ostream& sink);

}  // namespace nestdiag
