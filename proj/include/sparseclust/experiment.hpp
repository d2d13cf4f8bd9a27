#pragma once

// Seeded parameter sweeps over the clustering, low-degree and detection
// pipelines, with CSV persistence and per-cell summaries.
//
// Reproducibility contract: replicate r of grid cell c runs on
// derive_seed(base_seed, c, r) (see rng.hpp), records are ordered by
// (cell, replicate) regardless of thread count, and floats are written with
// 17 significant digits, so a config plus seed always yields the same bytes.

#include <sparseclust/fps.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sparseclust {

enum class ExperimentKind
{
    cluster1,
    cluster2,
    lowdeg,
    detect,
    sdp_diag,
};

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s); // throws ConfigError

struct ExperimentConfig
{
    ExperimentKind kind = ExperimentKind::cluster1;

    // Grid axes, expanded as a Cartesian product in this order (last fastest).
    std::vector<Index> n{200};
    std::vector<Index> p{500};
    std::vector<Index> s{5};
    std::vector<double> delta{4.0};
    std::vector<double> kappa{};   // empty: use ||theta||_inf of the drawn mean
    std::vector<double> lambda_C{2.0};
    std::vector<int> degree{4};
    std::vector<double> epsilon{1.0};

    Index replicates = 1;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out;               // empty: stdout

    std::string theta = "prior";   // prior | equal  (mean vector for cluster kinds)
    std::string labeler = "oracle"; // detect: oracle | alg1 | alg2 | random
    std::string lowdeg_method = "all"; // all | exact | mc | bound
    Index mc_reps = 20000;
    bool timing = false;           // adds a wall_ms column (not reproducible)

    SolverConfig solver;

    void validate() const; // throws ConfigError
    Index cell_count() const;
};

/// Applies `key=value` pairs (keys use '_' or '-'; arrays are comma lists).
/// Throws ConfigError on unknown keys or malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Reads a line-oriented key=value file ('#' starts a comment).
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}); // IoError if unreadable

/// Concrete parameters of one grid cell.
struct CellParams
{
    Index n = 0, p = 0, s = 0;
    double delta = 0.0;
    std::optional<double> kappa;
    double lambda_C = 0.0;
    int degree = 0;
    double epsilon = 1.0;
};

std::vector<CellParams> expand_grid(const ExperimentConfig& cfg);

struct ExperimentRecord
{
    ExperimentKind kind = ExperimentKind::cluster1;
    Index cell = 0;
    Index replicate = 0;
    std::uint64_t seed = 0;
    CellParams params;
    std::vector<std::optional<double>> outputs; // aligned with output_columns(kind)
    double wall_ms = 0.0;
};

const std::vector<std::string>& output_columns(ExperimentKind kind);

/// Runs one (cell, replicate) pipeline.
ExperimentRecord run_cell(const ExperimentConfig& cfg, const CellParams& cell, Index cell_index, Index replicate);

/// All cells x replicates, in row-major (cell, replicate) order, on cfg.jobs threads.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg);

/// Header-plus-rows text table; the exchange format between writer, reader and summaries.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    Index column(const std::string& name) const; // -1 if absent
};

inline constexpr const char* kSchemaLine = "# schema=1";

CsvTable records_table(const std::vector<ExperimentRecord>& records, bool timing = false);
void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in); // skips '#' lines; throws IoError on ragged rows

/// Formats a double with 17 significant digits (round-trips exactly).
std::string format_double(double v);

/// Per-cell count, mean, median and standard error of every output column.
/// Cells keep their parameter columns; SE is empty for single-replicate cells.
/// Throws std::invalid_argument on an empty table.
CsvTable summarize(const CsvTable& records);
CsvTable summarize(const std::vector<ExperimentRecord>& records);

/// Column-aligned plain-text rendering of a table.
std::string format_aligned(const CsvTable& table);

/// JSON dataset file: {"schema", "n", "p", "seed", "X" (p rows of n), "theta"?, "z"?}.
/// Doubles are written in shortest round-trip form.
void write_dataset(std::ostream& out, const Dataset& data, std::uint64_t seed);
Dataset read_dataset(std::istream& in); // throws IoError on malformed input

} // namespace sparseclust
