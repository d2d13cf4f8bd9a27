// Command-line front end: simulate datasets, run single pipelines or seeded
// sweeps, and summarize record CSVs.

#include <sparseclust/cluster.hpp>
#include <sparseclust/errors.hpp>
#include <sparseclust/experiment.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

using namespace sparseclust;

namespace {

enum ExitCode
{
    kOk = 0,
    kConfig = 2,
    kNumerical = 3,
    kIo = 4,
};

// Flags shared by every experiment subcommand; strings so that grid axes can
// be given as comma lists and routed through the config-file parser.
struct CommonFlags
{
    std::string config;
    std::map<std::string, std::string> values;
    std::vector<std::string> sets;
};

void add_common(CLI::App* app, CommonFlags& f, bool grid)
{
    app->add_option("--config", f.config, "key=value config file");
    const std::vector<std::pair<std::string, std::string>> scalars = {
        {"seed", "base seed"}, {"out", "output path (default stdout)"}};
    for (const auto& [key, help] : scalars) app->add_option("--" + key, f.values[key], help);
    if (grid) {
        app->add_option("--replicates", f.values["replicates"], "replicates per grid cell");
        app->add_option("--jobs", f.values["jobs"], "worker threads");
    }
    const std::vector<std::string> axes = {"n", "p", "s", "delta", "kappa", "lambda-C", "degree", "epsilon"};
    for (const auto& key : axes)
        app->add_option("--" + key, f.values[key], grid ? "grid axis (comma list)" : "model parameter");
    app->add_option("--set", f.sets, "extra key=value setting (repeatable)");
}

ExperimentConfig resolve(const CommonFlags& f, ExperimentConfig base)
{
    if (!f.config.empty()) base = load_config(f.config, base);
    for (const auto& [key, value] : f.values)
        if (!value.empty()) apply_setting(base, key, value);
    for (const auto& kv : f.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        apply_setting(base, kv.substr(0, eq), kv.substr(eq + 1));
    }
    base.validate();
    return base;
}

// Writes to cfg.out, or stdout when empty.
template <class F>
void emit(const std::string& path, F&& write)
{
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write(out);
    out.close();
    if (!out) throw IoError("write to '" + path + "' failed");
}

void run_sweep(const ExperimentConfig& cfg)
{
    const auto records = run_experiment(cfg);
    const CsvTable table = records_table(records, cfg.timing);
    emit(cfg.out, [&](std::ostream& os) { write_csv(os, table); });
}

ModelParams single_model(const ExperimentConfig& cfg)
{
    if (cfg.cell_count() != 1) throw ConfigError("simulate takes a single parameter setting, not a grid");
    ModelParams mp;
    mp.n = cfg.n.front();
    mp.p = cfg.p.front();
    mp.s = cfg.s.front();
    mp.delta = cfg.delta.front();
    if (!cfg.kappa.empty()) mp.kappa = cfg.kappa.front();
    mp.validate();
    return mp;
}

Dataset read_dataset_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset '" + path + "'");
    return read_dataset(in);
}

// Runs one clustering pipeline on a dataset file and prints key=value results.
void cluster_file(ExperimentKind kind, const ExperimentConfig& cfg, const std::string& path)
{
    const Dataset data = read_dataset_file(path);
    ClusterResult res;
    if (kind == ExperimentKind::cluster1) {
        ModelParams mp;
        mp.n = data.n();
        mp.p = data.p();
        mp.s = std::min<Index>(cfg.s.front(), data.p());
        mp.delta = cfg.delta.front();
        double kappa = cfg.kappa.empty() ? 0.0 : cfg.kappa.front();
        if (kappa <= 0 && data.truth) kappa = data.truth->theta.theta.cwiseAbs().maxCoeff();
        mp.kappa = kappa > 0 ? kappa : 1.0;
        SolverConfig sc = cfg.solver;
        sc.lambda = default_lambda(mp, cfg.lambda_C.front());
        res = sparse_spectral_cluster(data, sc);
    } else {
        res = sparse_cluster_splitting(data, std::min<Index>(cfg.s.front(), data.p()), cfg.seed);
    }
    emit(cfg.out, [&](std::ostream& os) {
        if (kind == ExperimentKind::cluster1) os << "lambda=" << format_double(res.lambda_used) << '\n';
        os << "converged=" << (res.converged ? 1 : 0) << '\n';
        if (res.k_hat) os << "k_hat=" << *res.k_hat << '\n';
        os << "support=";
        for (std::size_t i = 0; i < res.support.size(); ++i) os << (i ? "," : "") << res.support[i];
        os << '\n';
        if (res.loss) os << "loss=" << format_double(*res.loss) << '\n';
        os << "zhat=";
        for (Index i = 0; i < res.zhat.size(); ++i) os << (i ? "," : "") << res.zhat[i];
        os << '\n';
    });
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse two-cluster Gaussian mixtures: clustering, detection and low-degree experiments"};
    app.require_subcommand(1);

    CommonFlags sim_flags;
    std::string sim_theta = "prior";
    auto* sim = app.add_subcommand("simulate", "Draw one dataset and write it as JSON");
    add_common(sim, sim_flags, false);
    sim->add_option("--theta", sim_theta, "mean vector: prior or equal")->check(CLI::IsMember({"prior", "equal"}));

    std::map<std::string, std::pair<CommonFlags, std::string>> kinds;
    std::map<std::string, CLI::App*> kind_apps;
    const std::vector<std::pair<std::string, std::string>> kind_help = {
        {"cluster1", "Sparse spectral clustering via the Fantope SDP"},
        {"cluster2", "Three-way sample-splitting clustering"},
        {"lowdeg", "Low-degree likelihood-ratio norm: exact, Monte Carlo and bound"},
        {"detect", "Detection test built on a clustering routine"},
    };
    for (const auto& [name, help] : kind_help) {
        auto& [flags, data] = kinds[name];
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, flags, true);
        if (name == "cluster1" || name == "cluster2") sub->add_option("--data", data, "run once on a simulated dataset file");
        kind_apps[name] = sub;
    }

    CommonFlags sweep_flags;
    std::string sweep_kind;
    auto* sweep = app.add_subcommand("sweep", "Seeded parameter sweep (kind from --kind or the config file)");
    add_common(sweep, sweep_flags, true);
    sweep->add_option("--kind", sweep_kind, "cluster1, cluster2, lowdeg, detect or sdp-diag");

    std::string sum_in, sum_out;
    auto* summ = app.add_subcommand("summarize", "Per-cell mean, median and SE of a records CSV");
    summ->add_option("input", sum_in, "records CSV")->required();
    summ->add_option("--out", sum_out, "also write the summary as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (sim->parsed()) {
            ExperimentConfig cfg = resolve(sim_flags, {});
            cfg.theta = sim_theta;
            const ModelParams mp = single_model(cfg);
            const GroundTruth truth = sim_theta == "equal"
                                          ? GroundTruth{equal_entries_mean(mp.p, mp.s, mp.delta), sample_labels(mp.n, cfg.seed)}
                                          : sample_prior(mp, cfg.seed);
            const Dataset data = sample_model(mp, truth.theta, truth.z, cfg.seed);
            emit(cfg.out, [&](std::ostream& os) { write_dataset(os, data, cfg.seed); });
        } else if (sweep->parsed()) {
            ExperimentConfig base;
            if (!sweep_kind.empty()) apply_setting(base, "kind", sweep_kind);
            ExperimentConfig cfg = resolve(sweep_flags, base);
            if (!sweep_kind.empty()) cfg.kind = parse_kind(sweep_kind);
            run_sweep(cfg);
        } else if (summ->parsed()) {
            std::ifstream in(sum_in);
            if (!in) throw IoError("cannot open '" + sum_in + "'");
            const CsvTable summary = summarize(read_csv(in));
            std::cout << format_aligned(summary);
            if (!sum_out.empty()) emit(sum_out, [&](std::ostream& os) { write_csv(os, summary); });
        } else {
            for (auto& [name, entry] : kinds) {
                if (!kind_apps[name]->parsed()) continue;
                auto& [flags, data] = entry;
                ExperimentConfig base;
                base.kind = parse_kind(name);
                ExperimentConfig cfg = resolve(flags, base);
                cfg.kind = base.kind;
                if (!data.empty()) cluster_file(cfg.kind, cfg, data);
                else run_sweep(cfg);
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const OutsideRegime& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    }
    return kOk;
}
