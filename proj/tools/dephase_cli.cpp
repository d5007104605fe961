// dephase_cli: experiment driver for the dephasing library.
//
//   dephase_cli table1      [--n 2,4,...] [--boundary open|periodic]
//   dephase_cli signal      [--n 10] [--epsilon 0.4,0.02]
//   dephase_cli phase-cloud [--n 10]
//   dephase_cli coarse-grain [--n 10] [--epsilon 0.4]
//   dephase_cli band        [--n 10] [--epsilon 0.1]
//   dephase_cli levelstats  [--seed 1]
//   dephase_cli analytic
//   dephase_cli result2-check [--epsilon 0.02] [--seed 1]
//
// Every command also takes --config PATH and --out DIR. Settings resolve as
// command defaults, then the config file, then flags. Each output file starts
// with the resolved settings.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dephase/dephase.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace dephase;

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k = hamiltonian_keys();
        k.insert({"n_list", "epsilon", "seed", "out", "t_max", "t_step", "threshold", "observable", "initial_state",
                  "times", "bin_width", "alpha", "gamma", "levels", "draws", "block", "band", "delta2", "trials"});
        return k;
    }();
    return keys;
}

const std::map<std::string, std::map<std::string, std::string>>& command_defaults() {
    static const std::map<std::string, std::map<std::string, std::string>> d{
        {"table1", {{"n_list", "2,4,6,8,10,12"}, {"threshold", "0"}}},
        {"signal",
         {{"n_list", "10"}, {"epsilon", "0.4,0.02"}, {"t_max", "100"}, {"t_step", "0.05"}, {"threshold", "1e-4"},
          {"observable", "mx"}, {"initial_state", "x_polarized"}}},
        {"phase-cloud", {{"n_list", "10"}, {"times", "0,4,8,12,16,20"}, {"threshold", "1e-4"}, {"observable", "mx"}}},
        {"coarse-grain",
         {{"n_list", "10"}, {"epsilon", "0.4"}, {"t_max", "40"}, {"t_step", "0.1"}, {"threshold", "1e-4"},
          {"observable", "mx"}}},
        {"band",
         {{"n_list", "10"}, {"epsilon", "0.1"}, {"observable", "sx0"}, {"bin_width", "0.2"},
          {"alpha", "5.43656365691809"}}},
        {"levelstats",
         {{"levels", "1000"}, {"block", "20"}, {"band", "5"}, {"delta2", "0.05,0.5"}, {"t_step", "0.01"},
          {"seed", "1"}}},
        {"analytic", {{"gamma", "1"}, {"levels", "10000"}, {"draws", "32"}, {"t_step", "0.01"}, {"seed", "1"}}},
        {"result2-check",
         {{"epsilon", "0.02"}, {"gamma", "0.01"}, {"trials", "100"}, {"levels", "12001"}, {"seed", "1"}}},
    };
    return d;
}

const std::map<std::string, std::string>& model_defaults() {
    static const std::map<std::string, std::string> d{
        {"J", "1"}, {"delta", "0.5"}, {"j2", "1"}, {"hz", "0.2"}, {"out", "."}};
    return d;
}

struct Flags {
    std::string config;
    std::string n;
    std::string epsilon;
    std::string seed;
    std::string out;
    std::string boundary;
};

class Run {
public:
    Run(std::string command, const Flags& f) : command_(std::move(command)) {
        std::map<std::string, std::string> merged = model_defaults();
        for (const auto& [k, v] : command_defaults().at(command_)) merged[k] = v;
        if (!f.config.empty()) {
            const auto file = KeyValueConfig::parse_file(f.config);
            file.require_known(known_keys());
            for (const auto& [k, v] : file.entries()) merged[k] = v;
        }
        if (!f.n.empty()) merged["n_list"] = f.n;
        if (!f.epsilon.empty()) merged["epsilon"] = f.epsilon;
        if (!f.seed.empty()) merged["seed"] = f.seed;
        if (!f.out.empty()) merged["out"] = f.out;
        if (!f.boundary.empty()) merged["boundary"] = f.boundary;
        for (const auto& [k, v] : merged) kv_.set(k, v);
        if (kv_.has("boundary")) boundaries_ = {spec_for(2).boundary};
        else boundaries_ = {Boundary::open, Boundary::periodic};
        out_ = *kv_.get_string("out");
        fs::create_directories(out_);
    }

    const std::string& command() const { return command_; }
    const std::vector<Boundary>& boundaries() const { return boundaries_; }

    HamiltonianSpec spec_for(int n, std::optional<Boundary> b = std::nullopt) const {
        KeyValueConfig c = kv_;
        c.set("n_sites", std::to_string(n));
        auto s = hamiltonian_spec_from_config(c);
        if (b) s.boundary = *b;
        return s;
    }

    std::vector<int> n_list() const {
        auto v = kv_.get_int_list("n_list");
        if (!v || v->empty()) throw ConfigError("n_list is empty");
        for (int n : *v)
            if (n < 2 || n > 14) throw ConfigError("n values must lie in 2..14, got " + std::to_string(n));
        return *v;
    }
    double num(const std::string& key) const { return *kv_.get_double(key); }
    std::vector<double> nums(const std::string& key) const { return *kv_.get_double_list(key); }
    std::string str(const std::string& key) const { return *kv_.get_string(key); }
    std::uint64_t seed() const {
        const auto s = kv_.get_int("seed");
        if (!s || *s < 0) throw ConfigError("seed must be a non-negative integer");
        return static_cast<std::uint64_t>(*s);
    }

    json config_json() const {
        json j = json::object();
        for (const auto& [k, v] : kv_.entries()) j[k] = v;
        return j;
    }

    /// Opens out/name and writes the provenance header.
    std::ofstream open(const std::string& name, bool csv = true) {
        const fs::path p = fs::path(out_) / name;
        std::ofstream os(p);
        if (!os) throw ResourceError("cannot write '" + p.string() + "'");
        if (csv) {
            os << "# dephase_cli " << kVersion << ' ' << command_ << '\n';
            for (const auto& [k, v] : kv_.entries()) os << "# " << k << " = " << v << '\n';
        }
        written_.push_back(p.string());
        return os;
    }

    void write_report(const std::string& name, const json& result) {
        json doc;
        doc["version"] = kVersion;
        doc["command"] = command_;
        doc["config"] = config_json();
        doc["result"] = result;
        auto os = open(name, false);
        os << doc.dump(2) << '\n';
    }

    const std::vector<std::string>& written() const { return written_; }

private:
    std::string command_;
    KeyValueConfig kv_;
    std::vector<Boundary> boundaries_;
    std::string out_;
    std::vector<std::string> written_;
};

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

std::string tag(int n, Boundary b) { return "n" + std::to_string(n) + "_" + to_string(b); }

/// "mx" or s<axis><site>, e.g. "sx0", "sz5".
OperatorMatrix parse_observable(const std::string& name, int n) {
    if (name == "mx") return build_magnetization_x(n);
    if (name.size() >= 3 && name[0] == 's') {
        const Axis axis = parse_axis(std::string(1, name[1]));
        int site = -1;
        try {
            site = std::stoi(name.substr(2));
        } catch (const std::exception&) {
            throw ConfigError("bad observable '" + name + "'");
        }
        return build_local_observable(site, axis, n);
    }
    throw ConfigError("unknown observable '" + name + "' (mx or s<axis><site>)");
}

struct Pipeline {
    HamiltonianSpec spec;
    OperatorMatrix h;
    OperatorMatrix a;
    StateVector psi0;
    Populations pop;
    GapAmplitudeSet gas;
};

Pipeline run_pipeline(const Run& run, int n, Boundary b, const std::string& observable = "mx",
                      const std::string& initial = "x_polarized", double threshold = 0.0) {
    Pipeline p;
    p.spec = run.spec_for(n, b);
    p.h = build_hamiltonian(p.spec);
    p.a = parse_observable(observable, n);
    const auto spectrum = diagonalize(p.h);
    if (initial == "x_polarized") p.psi0 = build_x_polarized_state(n);
    else if (initial == "ground") p.psi0 = StateVector{spectrum.vectors.col(0)};
    else throw ConfigError("unknown initial_state '" + initial + "' (x_polarized or ground)");
    p.pop = populations(spectrum, p.psi0);
    p.gas = gap_amplitudes(p.pop, p.a);
    if (threshold > 0.0) p.gas = truncate(p.gas, threshold);
    return p;
}

json cmd_table1(Run& run) {
    const auto ns = run.n_list();
    auto csv = run.open("table1.csv");
    csv << "n,boundary,dim,d_eff,gaps,sigma_G,T_eq\n";
    csv.precision(17);
    json rows = json::array();
    for (Boundary b : run.boundaries())
        for (int n : ns) {
            const auto p = run_pipeline(run, n, b, "mx", "x_polarized", run.num("threshold"));
            const double sg = gap_dispersion(p.gas);
            const double teq = equilibration_time(sg);
            const double deff = effective_dimension(p.pop);
            csv << n << ',' << to_string(b) << ',' << p.h.dim() << ',' << deff << ',' << p.gas.size() << ',' << sg
                << ',' << teq << '\n';
            rows.push_back({{"n", n}, {"boundary", to_string(b)}, {"d_eff", deff}, {"gaps", p.gas.size()},
                            {"sigma_G", sg}, {"T_eq", teq}});
        }
    run.write_report("table1.json", rows);
    return rows;
}

json cmd_signal(Run& run) {
    const auto axis = UniformAxis::from_step(0.0, run.num("t_max"), run.num("t_step"));
    const auto eps = run.nums("epsilon");
    json rows = json::array();
    for (Boundary b : run.boundaries())
        for (int n : run.n_list()) {
            const auto p = run_pipeline(run, n, b, run.str("observable"), run.str("initial_state"), run.num("threshold"));
            const auto g = time_signal(p.gas, axis);
            std::vector<SignalGrid> smooth;
            for (double e : eps) smooth.push_back(cg_time_signal(g, e));
            auto csv = run.open("signal_" + tag(n, b) + ".csv");
            csv << "t,exact";
            for (double e : eps) csv << ",eps_" << fmt(e);
            csv << '\n';
            csv.precision(17);
            for (std::size_t k = 0; k < axis.size(); ++k) {
                csv << axis[k] << ',' << std::norm(g.values[k]);
                for (const auto& s : smooth) csv << ',' << std::norm(s.values[k]);
                csv << '\n';
            }
            json row{{"n", n}, {"boundary", to_string(b)}, {"gaps", p.gas.size()},
                     {"infinite_time_fluctuation", infinite_time_fluctuation(p.gas)}};
            if (!p.gas.empty()) {
                const double sg = gap_dispersion(p.gas);
                row["sigma_G"] = sg;
                row["T_eq"] = equilibration_time(sg);
            }
            rows.push_back(row);
        }
    run.write_report("signal.json", rows);
    return rows;
}

json cmd_phase_cloud(Run& run) {
    const auto times = run.nums("times");
    json rows = json::array();
    for (Boundary b : run.boundaries())
        for (int n : run.n_list()) {
            const auto p = run_pipeline(run, n, b, run.str("observable"), "x_polarized", run.num("threshold"));
            for (double t : times) {
                auto csv = run.open("phase_cloud_" + tag(n, b) + "_t" + fmt(t) + ".csv");
                write_phase_cloud_csv(csv, phase_cloud(p.gas, t));
            }
            rows.push_back({{"n", n}, {"boundary", to_string(b)}, {"points", p.gas.size()}, {"snapshots", times.size()}});
        }
    run.write_report("phase_cloud.json", rows);
    return rows;
}

json cmd_coarse_grain(Run& run) {
    const double threshold = run.num("threshold");
    const auto t_axis = UniformAxis::from_step(0.0, run.num("t_max"), run.num("t_step"));
    json rows = json::array();
    for (Boundary b : run.boundaries())
        for (int n : run.n_list()) {
            const auto p = run_pipeline(run, n, b, run.str("observable"), "x_polarized", threshold);
            const double sg = gap_dispersion(p.gas);
            for (double e : run.nums("epsilon")) {
                const auto cfg = CoarseGrainConfig::for_gaps(p.gas, e, threshold);
                auto csv = run.open("coarse_grain_" + tag(n, b) + "_eps" + fmt(e) + ".csv");
                write_frequency_csv(csv, cg_frequency_signal(p.gas, cfg));
                const double dw = cg_dispersion(p.gas, e);
                json row{{"n", n},
                         {"boundary", to_string(b)},
                         {"epsilon", e},
                         {"sigma_G", sg},
                         {"delta_omega_eps", dw},
                         {"relative_difference", std::abs(dw - sg) / sg},
                         {"inverse_ft_max_error", inverse_ft_consistency(p.gas, cfg, t_axis)}};
                std::vector<double> pg, pq;
                const auto q = p.gas.relevances();
                for (std::size_t k = 0; k < p.gas.size(); ++k)
                    if (p.gas.gaps[k] > 0.0) {
                        pg.push_back(p.gas.gaps[k]);
                        pq.push_back(q[k]);
                    }
                try {
                    const auto c = select_epsilon(pg, pq, 1.0 / sg);
                    row["suggested_epsilon"] = {{"epsilon", c.epsilon}, {"lower", c.lower}, {"upper", c.upper},
                                                {"valid", c.valid}};
                } catch (const NoValidEpsilon& err) {
                    row["suggested_epsilon"] = {{"error", err.code()}, {"message", err.what()}};
                }
                rows.push_back(row);
            }
        }
    run.write_report("coarse_grain.json", rows);
    return rows;
}

json cmd_band(Run& run) {
    const double eps = run.nums("epsilon").front();
    const double alpha = run.num("alpha");
    json rows = json::array();
    for (Boundary b : run.boundaries())
        for (int n : run.n_list()) {
            const auto p = run_pipeline(run, n, b, run.str("observable"));
            const double J = max_local_term_norm(p.spec);
            const auto em = energy_moments(p.psi0, p.h);
            const auto ebm = to_energy_basis(p.a, p.pop.basis);
            const auto profile = band_profile(ebm, BandWeighting::gaussian(em.mean, em.stddev), run.num("bin_width"));
            auto csv = run.open("band_" + tag(n, b) + "_" + run.str("observable") + ".csv");
            write_band_csv(csv, profile, 0.5, J, alpha);
            const auto rep = banded_bound_check(ebm, 0.5, J, alpha);
            json row{{"n", n},
                     {"boundary", to_string(b)},
                     {"J", J},
                     {"alpha", alpha},
                     {"pairs_checked", rep.pairs_checked},
                     {"max_ratio", rep.max_ratio},
                     {"violations", rep.violations.size()}};
            if (!p.gas.empty()) {
                const auto cfg = CoarseGrainConfig::for_gaps(p.gas, eps);
                const auto m = sigma_A(profile, cg_gap_density(p.gas.gaps, eps, cfg.omega_grid), eps);
                row["mu_A"] = m.mu;
                row["sigma_A"] = m.sigma;
            }
            rows.push_back(row);
        }
    run.write_report("band.json", rows);
    return rows;
}

json cmd_levelstats(Run& run) {
    const auto levels = static_cast<std::size_t>(run.num("levels"));
    const auto block = static_cast<std::size_t>(run.num("block"));
    const double band = run.num("band");
    const std::uint64_t seed = run.seed();
    const auto s1 = generate_spectrum(SpacingLaw::poisson, 1.0, levels, splitmix64(2 * seed));
    const auto s2 = block_resample(s1, block, SpacingLaw::wigner_dyson, splitmix64(2 * seed + 1));
    {
        auto a = run.open("levelstats_poisson.csv");
        write_levels_csv(a, s1);
        auto c = run.open("levelstats_resampled.csv");
        write_levels_csv(c, s2);
    }
    std::vector<double> raw;
    for (std::size_t k = 1; k < s1.size(); ++k) raw.push_back(s1.energies[k] - s1.energies[k - 1]);
    const auto resampled = block_normalized_spacings(s2, block);
    {
        auto a = run.open("levelstats_spacings_poisson.csv");
        write_spacing_histogram_csv(a, raw, SpacingLaw::poisson, 1.0, 0.1, 5.0);
        auto c = run.open("levelstats_spacings_resampled.csv");
        write_spacing_histogram_csv(c, resampled, SpacingLaw::wigner_dyson, 1.0, 0.1, 5.0);
    }

    const auto pa = banded_pair_amplitudes(levels, band);
    const auto g = attach_gaps(pa, s1.energies);
    const auto q = g.relevances();
    std::vector<double> pg, pq;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.gaps[k] > 0.0) {
            pg.push_back(g.gaps[k]);
            pq.push_back(q[k]);
        }
    const auto choice = select_epsilon(pg, pq, 1.0 / band);
    json checks = json::array();
    for (double d2 : run.nums("delta2")) {
        const auto r = distinguishability_check(pa, s1, s2, choice.epsilon, d2,
                                                UniformAxis::from_step(0.0, std::sqrt(d2) / choice.epsilon, run.num("t_step")));
        checks.push_back({{"delta2", d2}, {"delta1", r.delta1}, {"window", r.window}, {"samples", r.samples},
                          {"max_deviation", r.max_deviation}, {"margin", r.margin}, {"violations", r.violations}});
    }
    json result{{"levels", levels},
                {"max_displacement", max_displacement(s1, s2)},
                {"ks_poisson", kolmogorov_distance(raw, SpacingLaw::poisson, 1.0)},
                {"ks_resampled_wigner_dyson", kolmogorov_distance(resampled, SpacingLaw::wigner_dyson, 1.0)},
                {"epsilon", choice.epsilon},
                {"epsilon_valid", choice.valid},
                {"distinguishability", checks}};
    run.write_report("levelstats.json", result);
    return result;
}

json cmd_analytic(Run& run) {
    const double gamma = run.num("gamma");
    const double teq = lorentzian_teq(gamma);
    const auto t_axis = UniformAxis::from_step(0.0, 10.0 / gamma, run.num("t_step") / gamma);
    const std::string suffix = "_gamma" + fmt(gamma) + ".csv";
    {
        auto csv = run.open("analytic_F" + suffix);
        csv << "# T_eq = " << fmt(teq) << '\n';
        write_lorentzian_csv(csv, gamma, t_axis);
    }
    {
        auto csv = run.open("analytic_gap_density" + suffix);
        const LorentzianModel model{gamma};
        write_gap_density_csv(csv, gamma, model.band_width * gamma,
                              UniformAxis::from_step(-45.0 * gamma, 45.0 * gamma, 0.05 * gamma));
    }
    const auto draws = static_cast<std::size_t>(run.num("draws"));
    if (draws == 0) throw ConfigError("draws must be positive");
    RandomStream root(run.seed());
    std::vector<double> mean(t_axis.size(), 0.0);
    for (std::size_t r = 0; r < draws; ++r) {
        auto rs = root.split(r);
        const auto f = reimann_F(exponential_levels(static_cast<std::size_t>(run.num("levels")), gamma, rs), t_axis);
        for (std::size_t k = 0; k < t_axis.size(); ++k) mean[k] += f.values[k].real() / static_cast<double>(draws);
    }
    double worst = 0.0;
    {
        auto csv = run.open("analytic_reimann" + suffix);
        csv << "t,F_levels_mean,F_lorentzian\n";
        csv.precision(17);
        for (std::size_t k = 0; k < t_axis.size(); ++k) {
            const double want = lorentzian_F(t_axis[k], gamma);
            csv << t_axis[k] << ',' << mean[k] << ',' << want << '\n';
            if (t_axis[k] <= 5.0 / gamma) worst = std::max(worst, std::abs(mean[k] - want) / want);
        }
    }
    const double dw = lorentzian_dispersion(gamma);
    const double dt = lorentzian_time_spread(gamma);
    json result{{"gamma", gamma},
                {"T_eq", teq},
                {"F_at_T_eq", lorentzian_F(teq, gamma)},
                {"delta_omega", dw},
                {"delta_t", dt},
                {"uncertainty_product", dw * dt},
                {"levels_max_relative_error_t_le_5_over_gamma", worst}};
    run.write_report("analytic" + suffix.substr(0, suffix.size() - 4) + ".json", result);
    return result;
}

json cmd_result2(Run& run) {
    const auto levels = generate_spectrum(SpacingLaw::poisson, 5e-4, static_cast<std::size_t>(run.num("levels")),
                                          run.seed(), -3.0);
    const double gamma = run.num("gamma");
    SmoothAnsatz a;
    a.v_smooth = [](double w) { return cplx(0.01 * std::exp(-w * w / 2), 0.0); };
    a.gamma = [gamma](double) { return gamma; };
    a.K = 0.00607;
    a.seed = run.seed();
    json rows = json::array();
    for (double e : run.nums("epsilon")) {
        const auto r = result2_ensemble_check(a, levels.energies, e, static_cast<std::size_t>(run.num("trials")));
        rows.push_back({{"epsilon", r.epsilon},
                        {"gamma", gamma},
                        {"c1", r.c1},
                        {"m", r.m},
                        {"trials", r.trials},
                        {"points", r.points},
                        {"pass_fraction", r.pass_fraction},
                        {"median_deviation", r.median_deviation},
                        {"q90_deviation", r.q90_deviation},
                        {"max_deviation", r.max_deviation},
                        {"max_bound_ratio", r.max_bound_ratio}});
    }
    run.write_report("result2_check.json", rows);
    return rows;
}

int fail(const std::string& code, const std::string& message, int status) {
    std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
    return status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibration time scales of spin chains through dephasing."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"table1", "T_eq = pi / sigma_G for a list of chain lengths"},
        {"signal", "|g(t)|^2 with coarse-grained overlays"},
        {"phase-cloud", "v e^{iGt} snapshots"},
        {"coarse-grain", "coarse-grained frequency signal and its dispersion"},
        {"band", "energy-basis band profile and locality bound"},
        {"levelstats", "Poisson vs block-resampled spectra and their signals"},
        {"analytic", "Lorentzian worked example"},
        {"result2-check", "smooth-plus-noise ensemble check"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "key = value settings file");
        sub->add_option("--n", flags.n, "chain length or comma-separated list");
        sub->add_option("--epsilon", flags.epsilon, "coarse-graining width(s)");
        sub->add_option("--seed", flags.seed, "random seed");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--boundary", flags.boundary, "open or periodic (default: both where it applies)")
            ->check(CLI::IsMember({"open", "periodic"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 64);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        Run run(command, flags);
        json result;
        if (command == "table1") result = cmd_table1(run);
        else if (command == "signal") result = cmd_signal(run);
        else if (command == "phase-cloud") result = cmd_phase_cloud(run);
        else if (command == "coarse-grain") result = cmd_coarse_grain(run);
        else if (command == "band") result = cmd_band(run);
        else if (command == "levelstats") result = cmd_levelstats(run);
        else if (command == "analytic") result = cmd_analytic(run);
        else result = cmd_result2(run);
        for (const auto& f : run.written()) std::cout << f << '\n';
        return 0;
    } catch (const Error& e) {
        return fail(e.code(), e.what(), 2);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
}
