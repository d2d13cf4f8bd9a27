#include <sparseclust/cluster.hpp>
#include <sparseclust/detect.hpp>
#include <sparseclust/errors.hpp>
#include <sparseclust/experiment.hpp>
#include <sparseclust/lowdeg.hpp>
#include <sparseclust/rng.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

namespace sparseclust {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) parts.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

template <class T>
T parse_number(const std::string& key, const std::string& text)
{
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ConfigError("config: bad value '" + text + "' for key '" + key + "'");
    return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text)
{
    std::vector<T> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_number<T>(key, item));
    if (out.empty()) throw ConfigError("config: empty list for key '" + key + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("config: bad boolean '" + v + "' for key '" + key + "'");
}

const std::vector<std::string> kCommonColumns = {"kind", "cell", "replicate", "seed", "n", "p",
                                                 "s", "delta", "kappa", "lambda_C", "degree", "epsilon"};

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

double as_flag(bool b) { return b ? 1.0 : 0.0; }

// Mean vector for the cluster kinds.
GroundTruth draw_truth(const ExperimentConfig& cfg, const ModelParams& mp, std::uint64_t seed)
{
    if (cfg.theta == "equal") return GroundTruth{equal_entries_mean(mp.p, mp.s, mp.delta), sample_labels(mp.n, seed)};
    return sample_prior(mp, seed);
}

double kappa_for(const CellParams& cell, const SparseMean& theta)
{
    if (cell.kappa) return *cell.kappa;
    const double inf = theta.theta.cwiseAbs().maxCoeff();
    return inf > 0 ? inf : 1.0;
}

SolverConfig solver_for(const ExperimentConfig& cfg, const ModelParams& mp, double lambda_C)
{
    SolverConfig sc = cfg.solver;
    sc.lambda = default_lambda(mp, lambda_C);
    return sc;
}

} // namespace

std::string to_string(ExperimentKind k)
{
    switch (k) {
    case ExperimentKind::cluster1: return "cluster1";
    case ExperimentKind::cluster2: return "cluster2";
    case ExperimentKind::lowdeg: return "lowdeg";
    case ExperimentKind::detect: return "detect";
    case ExperimentKind::sdp_diag: return "sdp-diag";
    }
    return "unknown";
}

ExperimentKind parse_kind(const std::string& s)
{
    if (s == "cluster1") return ExperimentKind::cluster1;
    if (s == "cluster2") return ExperimentKind::cluster2;
    if (s == "lowdeg") return ExperimentKind::lowdeg;
    if (s == "detect") return ExperimentKind::detect;
    if (s == "sdp-diag" || s == "sdp_diag") return ExperimentKind::sdp_diag;
    throw ConfigError("config: unknown experiment kind '" + s + "'");
}

void ExperimentConfig::validate() const
{
    if (replicates < 1) throw ConfigError("config: replicates must be >= 1");
    if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
    if (n.empty() || p.empty() || s.empty() || delta.empty() || lambda_C.empty() || degree.empty() || epsilon.empty())
        throw ConfigError("config: every grid axis needs at least one value");
    if (theta != "prior" && theta != "equal") throw ConfigError("config: theta must be prior or equal");
    if (labeler != "oracle" && labeler != "alg1" && labeler != "alg2" && labeler != "random")
        throw ConfigError("config: labeler must be oracle, alg1, alg2 or random");
    if (lowdeg_method != "all" && lowdeg_method != "exact" && lowdeg_method != "mc" && lowdeg_method != "bound")
        throw ConfigError("config: lowdeg_method must be all, exact, mc or bound");
    if (mc_reps < 2) throw ConfigError("config: mc_reps must be >= 2");
    for (Index v : n)
        if (v < 1) throw ConfigError("config: n must be >= 1");
    for (Index v : p)
        if (v < 1) throw ConfigError("config: p must be >= 1");
    for (Index v : s)
        if (v < 1) throw ConfigError("config: s must be >= 1");
    for (double v : delta)
        if (!(v >= 0)) throw ConfigError("config: delta must be >= 0");
    for (double v : kappa)
        if (!(v > 0)) throw ConfigError("config: kappa must be > 0");
    for (double v : lambda_C)
        if (!(v > 0)) throw ConfigError("config: lambda_C must be > 0");
    for (int v : degree)
        if (v < 0) throw ConfigError("config: degree must be >= 0");
    for (double v : epsilon)
        if (!(v > 0 && v <= 1)) throw ConfigError("config: epsilon must be in (0, 1]");
    try {
        solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

Index ExperimentConfig::cell_count() const
{
    const auto sz = [](const auto& v) { return static_cast<Index>(v.size()); };
    return sz(n) * sz(p) * sz(s) * sz(delta) * std::max<Index>(1, sz(kappa)) * sz(lambda_C) * sz(degree) * sz(epsilon);
}

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value)
{
    std::string key = trim(raw_key);
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string v = trim(raw_value);

    if (key == "kind") cfg.kind = parse_kind(v);
    else if (key == "n") cfg.n = parse_list<Index>(key, v);
    else if (key == "p") cfg.p = parse_list<Index>(key, v);
    else if (key == "s") cfg.s = parse_list<Index>(key, v);
    else if (key == "delta") cfg.delta = parse_list<double>(key, v);
    else if (key == "kappa") cfg.kappa = v.empty() ? std::vector<double>{} : parse_list<double>(key, v);
    else if (key == "lambda_C" || key == "lambda_c") cfg.lambda_C = parse_list<double>(key, v);
    else if (key == "degree" || key == "D") cfg.degree = parse_list<int>(key, v);
    else if (key == "epsilon") cfg.epsilon = parse_list<double>(key, v);
    else if (key == "replicates") cfg.replicates = parse_number<Index>(key, v);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "jobs") cfg.jobs = parse_number<int>(key, v);
    else if (key == "out") cfg.out = v;
    else if (key == "theta") cfg.theta = v;
    else if (key == "labeler") cfg.labeler = v;
    else if (key == "lowdeg_method") cfg.lowdeg_method = v;
    else if (key == "mc_reps") cfg.mc_reps = parse_number<Index>(key, v);
    else if (key == "timing") cfg.timing = parse_bool(key, v);
    else if (key == "rho") cfg.solver.rho = parse_number<double>(key, v);
    else if (key == "max_iters") cfg.solver.max_iters = parse_number<Index>(key, v);
    else if (key == "tol_primal") cfg.solver.tol_primal = parse_number<double>(key, v);
    else if (key == "tol_dual") cfg.solver.tol_dual = parse_number<double>(key, v);
    else if (key == "supp_tol") cfg.solver.supp_tol = parse_number<double>(key, v);
    else if (key == "adaptive_rho") cfg.solver.adaptive_rho = parse_bool(key, v);
    else throw ConfigError("config: unknown key '" + raw_key + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    return parse_config(in, std::move(base));
}

std::vector<CellParams> expand_grid(const ExperimentConfig& cfg)
{
    std::vector<std::optional<double>> kappas;
    if (cfg.kappa.empty()) kappas.emplace_back();
    for (double k : cfg.kappa) kappas.emplace_back(k);

    std::vector<CellParams> cells;
    for (Index n : cfg.n)
        for (Index p : cfg.p)
            for (Index s : cfg.s)
                for (double delta : cfg.delta)
                    for (const auto& kappa : kappas)
                        for (double C : cfg.lambda_C)
                            for (int D : cfg.degree)
                                for (double eps : cfg.epsilon)
                                    cells.push_back(CellParams{n, p, s, delta, kappa, C, D, eps});
    return cells;
}

const std::vector<std::string>& output_columns(ExperimentKind kind)
{
    static const std::vector<std::string> cluster1 = {"loss",     "support_ok", "support_size", "lambda",
                                                      "kappa_used", "converged", "iterations"};
    static const std::vector<std::string> cluster2 = {"loss", "k_hat", "k_hat_in_support", "support_ok"};
    static const std::vector<std::string> sdp = {"lambda",         "support_ok",    "cert_valid",      "cert_offblock_sup",
                                                 "proj_error",     "objective",     "primal_residual", "dual_residual",
                                                 "iterations",     "converged"};
    static const std::vector<std::string> lowdeg = {"norm_exact", "norm_mc", "norm_mc_se", "ratio_r", "norm_bound"};
    static const std::vector<std::string> detect = {"threshold", "stat_null", "stat_alt", "reject_null", "reject_alt",
                                                    "labeler_signal"};
    switch (kind) {
    case ExperimentKind::cluster1: return cluster1;
    case ExperimentKind::cluster2: return cluster2;
    case ExperimentKind::sdp_diag: return sdp;
    case ExperimentKind::lowdeg: return lowdeg;
    case ExperimentKind::detect: return detect;
    }
    return cluster1;
}

ExperimentRecord run_cell(const ExperimentConfig& cfg, const CellParams& cell, Index cell_index, Index replicate)
{
    ExperimentRecord rec;
    rec.kind = cfg.kind;
    rec.cell = cell_index;
    rec.replicate = replicate;
    rec.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(cell_index), static_cast<std::uint64_t>(replicate));
    rec.params = cell;
    const auto t0 = std::chrono::steady_clock::now();

    ModelParams mp;
    mp.n = cell.n;
    mp.p = cell.p;
    mp.s = cell.s;
    mp.delta = cell.delta;
    mp.kappa = cell.kappa;
    mp.validate();

    auto& out = rec.outputs;
    switch (cfg.kind) {
    case ExperimentKind::cluster1:
    case ExperimentKind::sdp_diag: {
        const GroundTruth truth = draw_truth(cfg, mp, rec.seed);
        const Dataset data = sample_model(mp, truth.theta, truth.z, rec.seed);
        ModelParams lp = mp;
        lp.kappa = kappa_for(cell, truth.theta);
        const SolverConfig sc = solver_for(cfg, lp, cell.lambda_C);
        if (cfg.kind == ExperimentKind::cluster1) {
            const ClusterResult res = sparse_spectral_cluster(data, sc);
            out = {res.loss,
                   as_flag(is_subset(res.support, truth.theta.support)),
                   static_cast<double>(res.support.size()),
                   sc.lambda,
                   *lp.kappa,
                   as_flag(res.converged),
                   static_cast<double>(res.solver->iterations)};
        } else {
            const SymmetricMatrix M = input_matrix(data);
            const SolverResult sol = solve_sdp(M, sc);
            std::optional<double> cert_valid, cert_sup, perr;
            if (!truth.theta.is_zero()) {
                const CertificateReport rep = dual_certificate(M, sol, truth.theta.support, sc.lambda);
                cert_valid = as_flag(rep.valid());
                cert_sup = rep.offblock_sup;
                perr = projector_error(sol.P_hat.P, truth.theta);
            }
            out = {sc.lambda,
                   as_flag(is_subset(sol.P_hat.support, truth.theta.support)),
                   cert_valid,
                   cert_sup,
                   perr,
                   sol.objective,
                   sol.primal_residual,
                   sol.dual_residual,
                   static_cast<double>(sol.iterations),
                   as_flag(sol.converged)};
        }
        break;
    }
    case ExperimentKind::cluster2: {
        const GroundTruth truth = draw_truth(cfg, mp, rec.seed);
        const Dataset data = sample_model(mp, truth.theta, truth.z, rec.seed);
        const ClusterResult res = sparse_cluster_splitting(data, cell.s, derive_seed(rec.seed, stream::split));
        const auto& supp = truth.theta.support;
        const bool k_in = std::binary_search(supp.begin(), supp.end(), *res.k_hat);
        out = {res.loss, static_cast<double>(*res.k_hat), as_flag(k_in), as_flag(is_subset(res.support, supp))};
        break;
    }
    case ExperimentKind::lowdeg: {
        LowDegParams lp{cell.n, cell.p, cell.s, cell.delta, cell.degree, 0.0};
        const bool all = cfg.lowdeg_method == "all";
        std::optional<double> exact, mc, mc_se, bound;
        if (all || cfg.lowdeg_method == "exact") {
            try {
                exact = lowdeg_norm_exact(lp).value;
            } catch (const std::invalid_argument&) {
                if (!all) throw;
            }
        }
        if (all || cfg.lowdeg_method == "mc") {
            const NormEstimate e = lowdeg_norm_mc(lp, cfg.mc_reps, rec.seed);
            mc = e.value;
            mc_se = e.std_error;
        }
        const double r = lowdeg_ratio(lp);
        // An explicit request outside the bound's regime is an error; "all" leaves the cell empty.
        if (cfg.lowdeg_method == "bound" || (all && r < 1.0)) bound = lowdeg_bound(lp);
        out = {exact, mc, mc_se, r, bound};
        break;
    }
    case ExperimentKind::detect: {
        DetectConfig dc{cell.epsilon, cell.n, cell.p, cell.s, 6.0};
        Labeler labeler;
        if (cfg.labeler == "oracle") {
            labeler = oracle_labeler();
        } else if (cfg.labeler == "random") {
            labeler = random_labeler(derive_seed(rec.seed, stream::labels));
        } else if (cfg.labeler == "alg2") {
            const auto s = cell.s;
            const auto sd = derive_seed(rec.seed, stream::split_aux);
            labeler = [s, sd](const Dataset& d) { return sparse_cluster_splitting(d, s, sd).zhat; };
        } else {
            ModelParams lp = mp;
            const double c2 = std::sqrt(1.0 + cell.epsilon * cell.epsilon);
            lp.kappa = cell.kappa ? *cell.kappa : std::max(cell.delta / std::sqrt(static_cast<double>(cell.s)) / c2, 1e-12);
            const SolverConfig sc = solver_for(cfg, lp, cell.lambda_C);
            labeler = [sc](const Dataset& d) { return sparse_spectral_cluster(d, sc).zhat; };
        }
        const Dataset null_data = sample_null(mp, derive_seed(rec.seed, stream::trial, 0));
        const DetectionOutcome on_null = detection_test(null_data, labeler, dc, derive_seed(rec.seed, stream::trial, 1));
        const std::uint64_t alt_seed = derive_seed(rec.seed, stream::trial, 2);
        const GroundTruth truth = sample_prior(mp, alt_seed);
        const Dataset alt = sample_model(mp, truth.theta, truth.z, alt_seed);
        const DetectionOutcome on_alt = detection_test(alt, labeler, dc, derive_seed(rec.seed, stream::trial, 3));
        out = {on_null.threshold,       on_null.statistic,       on_alt.statistic,
               as_flag(on_null.reject), as_flag(on_alt.reject), cell.delta / std::sqrt(1.0 + cell.epsilon * cell.epsilon)};
        break;
    }
    }
    for (const auto& v : out)
        if (v && !std::isfinite(*v)) throw NumericalError("run_cell: non-finite output in cell " + std::to_string(cell_index));
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    const std::vector<CellParams> cells = expand_grid(cfg);
    const auto reps = cfg.replicates;
    const auto total = static_cast<Index>(cells.size()) * reps;
    std::vector<ExperimentRecord> records(static_cast<std::size_t>(total));

    std::atomic<Index> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        while (true) {
            const Index task = next.fetch_add(1);
            if (task >= total) return;
            {
                std::lock_guard lock(failure_mutex);
                if (failure) return;
            }
            const Index c = task / reps;
            const Index r = task % reps;
            try {
                records[static_cast<std::size_t>(task)] = run_cell(cfg, cells[static_cast<std::size_t>(c)], c, r);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    const int nthreads = static_cast<int>(std::min<Index>(cfg.jobs, std::max<Index>(total, 1)));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return records;
}

Index CsvTable::column(const std::string& name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<Index>(it - header.begin());
}

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable records_table(const std::vector<ExperimentRecord>& records, bool timing)
{
    CsvTable t;
    t.header = kCommonColumns;
    const ExperimentKind kind = records.empty() ? ExperimentKind::cluster1 : records.front().kind;
    for (const auto& c : output_columns(kind)) t.header.push_back(c);
    if (timing) t.header.emplace_back("wall_ms");

    for (const auto& r : records) {
        if (r.kind != kind) throw std::invalid_argument("records_table: mixed experiment kinds");
        std::vector<std::string> row = {to_string(r.kind),
                                        std::to_string(r.cell),
                                        std::to_string(r.replicate),
                                        std::to_string(r.seed),
                                        std::to_string(r.params.n),
                                        std::to_string(r.params.p),
                                        std::to_string(r.params.s),
                                        format_double(r.params.delta),
                                        format_optional(r.params.kappa),
                                        format_double(r.params.lambda_C),
                                        std::to_string(r.params.degree),
                                        format_double(r.params.epsilon)};
        for (const auto& v : r.outputs) row.push_back(format_optional(v));
        if (timing) row.push_back(format_double(r.wall_ms));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_csv(std::ostream& out, const CsvTable& table)
{
    out << kSchemaLine << '\n';
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
    if (!out) throw IoError("write_csv: stream failure");
}

CsvTable read_csv(std::istream& in)
{
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto cells = split(line, ',');
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size()) throw IoError("read_csv: row has " + std::to_string(cells.size()) + " fields, header has " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw IoError("read_csv: no header row");
    return t;
}

CsvTable summarize(const CsvTable& records)
{
    if (records.rows.empty()) throw std::invalid_argument("summarize: no records");
    const Index cell_col = records.column("cell");
    if (cell_col < 0) throw std::invalid_argument("summarize: records have no 'cell' column");

    std::vector<Index> param_cols, out_cols;
    for (Index c = 0; c < static_cast<Index>(records.header.size()); ++c) {
        const auto& name = records.header[static_cast<std::size_t>(c)];
        if (name == "replicate" || name == "seed" || name == "cell") continue;
        const bool common = std::find(kCommonColumns.begin(), kCommonColumns.end(), name) != kCommonColumns.end();
        (common ? param_cols : out_cols).push_back(c);
    }

    std::map<long long, std::vector<const std::vector<std::string>*>> groups;
    for (const auto& row : records.rows) {
        const auto& cell_text = row[static_cast<std::size_t>(cell_col)];
        groups[parse_number<long long>("cell", cell_text)].push_back(&row);
    }

    CsvTable t;
    t.header.emplace_back("cell");
    for (Index c : param_cols) t.header.push_back(records.header[static_cast<std::size_t>(c)]);
    t.header.emplace_back("count");
    for (Index c : out_cols) {
        const auto& name = records.header[static_cast<std::size_t>(c)];
        t.header.push_back(name + "_mean");
        t.header.push_back(name + "_median");
        t.header.push_back(name + "_se");
    }

    for (const auto& [cell, rows] : groups) {
        std::vector<std::string> out = {std::to_string(cell)};
        for (Index c : param_cols) out.push_back((*rows.front())[static_cast<std::size_t>(c)]);
        out.push_back(std::to_string(rows.size()));
        for (Index c : out_cols) {
            std::vector<double> xs;
            for (const auto* row : rows) {
                const auto& text = (*row)[static_cast<std::size_t>(c)];
                if (!text.empty()) xs.push_back(std::stod(text));
            }
            if (xs.empty()) {
                out.insert(out.end(), 3, std::string{});
                continue;
            }
            const auto m = static_cast<double>(xs.size());
            double mean = 0.0;
            for (double x : xs) mean += x;
            mean /= m;
            std::vector<double> sorted = xs;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t h = sorted.size() / 2;
            const double median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
            out.push_back(format_double(mean));
            out.push_back(format_double(median));
            if (xs.size() < 2) {
                out.emplace_back();
            } else {
                double ss = 0.0;
                for (double x : xs) ss += (x - mean) * (x - mean);
                out.push_back(format_double(std::sqrt(ss / (m - 1) / m)));
            }
        }
        t.rows.push_back(std::move(out));
    }
    return t;
}

CsvTable summarize(const std::vector<ExperimentRecord>& records) { return summarize(records_table(records)); }

std::string format_aligned(const CsvTable& table)
{
    std::vector<std::size_t> width(table.header.size(), 0);
    for (std::size_t c = 0; c < table.header.size(); ++c) width[c] = table.header[c].size();
    for (const auto& row : table.rows)
        for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());

    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) os << "  ";
            os << cells[c] << std::string(width[c] - cells[c].size(), ' ');
        }
        os << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
    return os.str();
}

void write_dataset(std::ostream& out, const Dataset& data, std::uint64_t seed)
{
    nlohmann::json j;
    j["schema"] = 1;
    j["n"] = data.n();
    j["p"] = data.p();
    j["seed"] = seed;
    auto& rows = j["X"] = nlohmann::json::array();
    for (Index r = 0; r < data.p(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(data.n()));
        for (Index i = 0; i < data.n(); ++i) row[static_cast<std::size_t>(i)] = data.X(r, i);
        rows.push_back(row);
    }
    if (data.truth) {
        j["theta"] = std::vector<double>(data.truth->theta.theta.begin(), data.truth->theta.theta.end());
        const Eigen::VectorXi& z = data.truth->z.values();
        j["z"] = std::vector<int>(z.begin(), z.end());
    }
    out << j.dump() << '\n';
    if (!out) throw IoError("write_dataset: stream failure");
}

Dataset read_dataset(std::istream& in)
{
    try {
        const nlohmann::json j = nlohmann::json::parse(in);
        const auto n = j.at("n").get<Index>();
        const auto p = j.at("p").get<Index>();
        const auto& rows = j.at("X");
        if (n < 1 || p < 1 || static_cast<Index>(rows.size()) != p) throw IoError("read_dataset: X has the wrong number of rows");
        Dataset d;
        d.X.resize(p, n);
        for (Index r = 0; r < p; ++r) {
            const auto row = rows[static_cast<std::size_t>(r)].get<std::vector<double>>();
            if (static_cast<Index>(row.size()) != n) throw IoError("read_dataset: ragged X row " + std::to_string(r));
            for (Index i = 0; i < n; ++i) d.X(r, i) = row[static_cast<std::size_t>(i)];
        }
        if (j.contains("theta") && j.contains("z")) {
            const auto theta = j["theta"].get<std::vector<double>>();
            const auto z = j["z"].get<std::vector<int>>();
            if (static_cast<Index>(theta.size()) != p || static_cast<Index>(z.size()) != n)
                throw IoError("read_dataset: truth has the wrong shape");
            d.truth = GroundTruth{SparseMean(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(theta.data(), p))),
                                  Labels(Eigen::VectorXi(Eigen::Map<const Eigen::VectorXi>(z.data(), n)))};
        }
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("read_dataset: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("read_dataset: ") + e.what());
    }
}

} // namespace sparseclust
