#include "ranklab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ranklab/capital.hpp"
#include "ranklab/distance.hpp"
#include "ranklab/errors.hpp"
#include "ranklab/io.hpp"
#include "ranklab/pde.hpp"
#include "ranklab/simulator.hpp"
#include "ranklab/stability.hpp"
#include "ranklab/waves.hpp"

namespace ranklab {

using nlohmann::json;

// ---------------------------------------------------------------------------
// profile / law construction
// ---------------------------------------------------------------------------

CoefficientProfile ProfileConfig::finite(int n_override) const {
    const int size = n_override > 0 ? n_override : n;
    switch (kind) {
        case Kind::Atlas:
            return make_atlas(size, gamma);
        case Kind::Explicit: {
            CoefficientProfile c;
            c.drifts = drifts;
            c.diffusions = diffusions;
            c.validate();
            if (n_override > 0 && c.n() != n_override)
                throw config_error("profile.drifts", "size disagrees with the requested n");
            return c;
        }
        case Kind::MeanField:
        case Kind::SmoothedAtlas: {
            if (size < 1)
                throw config_error("profile.n", "mean-field profiles need n to discretize");
            return discretize_meanfield(meanfield(), size);
        }
    }
    throw config_error("profile.kind", "unknown kind");
}

MeanFieldProfile ProfileConfig::meanfield() const {
    switch (kind) {
        case Kind::MeanField:
            return MeanFieldProfile(b_knots, sigma2_knots);
        case Kind::SmoothedAtlas:
            return make_smoothed_atlas(gamma, width);
        default:
            throw config_error("profile.kind",
                               "this command needs a mean-field profile (meanfield or "
                               "smoothed_atlas)");
    }
}

InitialLaw InitialLawConfig::build() const {
    switch (kind) {
        case Kind::Point:
            return InitialLaw::point_mass(at);
        case Kind::Uniform:
            return InitialLaw::uniform(a, b);
        case Kind::Gaussian:
            return InitialLaw::gaussian(mean, variance);
        case Kind::Samples:
            return InitialLaw::samples_from_file(path);
    }
    throw config_error("initial_law.kind", "unknown kind");
}

std::vector<double> SimSection::resolved_record_times() const {
    if (!record_times.empty()) return record_times;
    std::vector<double> times;
    if (record_stride > 0.0)
        for (double t = record_from; t <= t_end * (1.0 + 1e-12); t += record_stride)
            times.push_back(std::min(t, t_end));
    else
        times.push_back(t_end);
    return times;
}

// ---------------------------------------------------------------------------
// strict JSON handling
// ---------------------------------------------------------------------------

namespace {

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&key](const char* a) { return key == a; }) == allowed.end())
            throw config_error(path.empty() ? key : path + "." + key, "unknown key");
    }
}

template <typename T>
T get_as(const json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error(path + "." + key, "wrong type");
    }
}

std::vector<double> get_vector(const json& obj, const std::string& path, const char* key,
                               std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<std::vector<double>>();
    } catch (const json::exception&) {
        throw config_error(path + "." + key, "expected an array of numbers");
    }
}

std::vector<std::pair<double, double>> get_knots(const json& obj, const std::string& path,
                                                 const char* key) {
    std::vector<std::pair<double, double>> knots;
    if (!obj.contains(key)) return knots;
    const json& arr = obj.at(key);
    if (!arr.is_array()) throw config_error(path + "." + key, "expected an array of [u, value]");
    for (const auto& item : arr) {
        if (!item.is_array() || item.size() != 2)
            throw config_error(path + "." + key, "each knot must be a [u, value] pair");
        knots.emplace_back(item[0].get<double>(), item[1].get<double>());
    }
    return knots;
}

InitialLawConfig parse_initial_law(const json& obj, const std::string& path) {
    reject_unknown(obj, path, {"kind", "at", "a", "b", "mean", "variance", "path"});
    InitialLawConfig law;
    const std::string kind = get_as<std::string>(obj, path, "kind", "gaussian");
    if (kind == "point")
        law.kind = InitialLawConfig::Kind::Point;
    else if (kind == "uniform")
        law.kind = InitialLawConfig::Kind::Uniform;
    else if (kind == "gaussian")
        law.kind = InitialLawConfig::Kind::Gaussian;
    else if (kind == "samples")
        law.kind = InitialLawConfig::Kind::Samples;
    else
        throw config_error(path + ".kind", "expected point|uniform|gaussian|samples");
    law.at = get_as<double>(obj, path, "at", law.at);
    law.a = get_as<double>(obj, path, "a", law.a);
    law.b = get_as<double>(obj, path, "b", law.b);
    law.mean = get_as<double>(obj, path, "mean", law.mean);
    law.variance = get_as<double>(obj, path, "variance", law.variance);
    law.path = get_as<std::string>(obj, path, "path", law.path);
    return law;
}

ProfileConfig parse_profile(const json& obj) {
    reject_unknown(obj, "profile",
                   {"kind", "n", "gamma", "width", "drifts", "diffusions", "b_knots",
                    "sigma2_knots"});
    ProfileConfig p;
    const std::string kind = get_as<std::string>(obj, "profile", "kind", "atlas");
    if (kind == "atlas")
        p.kind = ProfileConfig::Kind::Atlas;
    else if (kind == "explicit")
        p.kind = ProfileConfig::Kind::Explicit;
    else if (kind == "meanfield")
        p.kind = ProfileConfig::Kind::MeanField;
    else if (kind == "smoothed_atlas")
        p.kind = ProfileConfig::Kind::SmoothedAtlas;
    else
        throw config_error("profile.kind", "expected atlas|explicit|meanfield|smoothed_atlas");
    p.n = get_as<int>(obj, "profile", "n", p.n);
    p.gamma = get_as<double>(obj, "profile", "gamma", p.gamma);
    p.width = get_as<double>(obj, "profile", "width", p.width);
    p.drifts = get_vector(obj, "profile", "drifts", {});
    p.diffusions = get_vector(obj, "profile", "diffusions", {});
    if (p.kind == ProfileConfig::Kind::Explicit && p.diffusions.empty())
        p.diffusions.assign(p.drifts.size(), 1.0);
    p.b_knots = get_knots(obj, "profile", "b_knots");
    p.sigma2_knots = get_knots(obj, "profile", "sigma2_knots");
    if (p.kind == ProfileConfig::Kind::MeanField && p.sigma2_knots.empty())
        p.sigma2_knots = {{0.0, 1.0}, {1.0, 1.0}};
    return p;
}

SimSection parse_sim(const json& obj) {
    reject_unknown(obj, "sim",
                   {"n", "dt", "t_end", "seed", "initial_law", "record_times", "record_stride",
                    "record_from", "burn_in_fraction", "output_mode", "quantile_levels"});
    SimSection s;
    s.n = get_as<int>(obj, "sim", "n", s.n);
    s.dt = get_as<double>(obj, "sim", "dt", s.dt);
    s.t_end = get_as<double>(obj, "sim", "t_end", s.t_end);
    s.seed = get_as<std::uint64_t>(obj, "sim", "seed", s.seed);
    if (obj.contains("initial_law"))
        s.initial_law = parse_initial_law(obj.at("initial_law"), "sim.initial_law");
    s.record_times = get_vector(obj, "sim", "record_times", {});
    s.record_stride = get_as<double>(obj, "sim", "record_stride", s.record_stride);
    s.record_from = get_as<double>(obj, "sim", "record_from", s.record_from);
    s.burn_in_fraction = get_as<double>(obj, "sim", "burn_in_fraction", s.burn_in_fraction);
    const std::string mode = get_as<std::string>(obj, "sim", "output_mode", "quantiles");
    if (mode == "positions")
        s.output_mode = SimSection::OutputMode::Positions;
    else if (mode == "quantiles")
        s.output_mode = SimSection::OutputMode::Quantiles;
    else
        throw config_error("sim.output_mode", "expected positions|quantiles");
    s.quantile_levels = get_vector(obj, "sim", "quantile_levels", s.quantile_levels);
    return s;
}

PdeSection parse_pde(const json& obj) {
    reject_unknown(obj, "pde",
                   {"x_min", "x_max", "nx", "t_end", "record_times", "flux_order",
                    "initial_law", "restart_from"});
    PdeSection p;
    p.x_min = get_as<double>(obj, "pde", "x_min", p.x_min);
    p.x_max = get_as<double>(obj, "pde", "x_max", p.x_max);
    p.nx = get_as<int>(obj, "pde", "nx", p.nx);
    p.t_end = get_as<double>(obj, "pde", "t_end", p.t_end);
    p.record_times = get_vector(obj, "pde", "record_times", {});
    p.flux_order = get_as<int>(obj, "pde", "flux_order", p.flux_order);
    if (obj.contains("initial_law"))
        p.initial_law = parse_initial_law(obj.at("initial_law"), "pde.initial_law");
    p.restart_from = get_as<std::string>(obj, "pde", "restart_from", p.restart_from);
    return p;
}

WaveSection parse_wave(const json& obj) {
    reject_unknown(obj, "wave", {"target_mean", "x_min", "x_max", "samples", "experiment"});
    WaveSection w;
    w.target_mean = get_as<double>(obj, "wave", "target_mean", w.target_mean);
    w.x_min = get_as<double>(obj, "wave", "x_min", w.x_min);
    w.x_max = get_as<double>(obj, "wave", "x_max", w.x_max);
    w.samples = get_as<int>(obj, "wave", "samples", w.samples);
    if (obj.contains("experiment")) {
        const json& e = obj.at("experiment");
        reject_unknown(e, "wave.experiment",
                       {"shifts", "weights", "horizon", "x_min", "x_max", "nx",
                        "record_stride"});
        WaveExperimentSection ex;
        ex.shifts = get_vector(e, "wave.experiment", "shifts", ex.shifts);
        ex.weights = get_vector(e, "wave.experiment", "weights", ex.weights);
        ex.horizon = get_as<double>(e, "wave.experiment", "horizon", ex.horizon);
        ex.x_min = get_as<double>(e, "wave.experiment", "x_min", ex.x_min);
        ex.x_max = get_as<double>(e, "wave.experiment", "x_max", ex.x_max);
        ex.nx = get_as<int>(e, "wave.experiment", "nx", ex.nx);
        ex.record_stride = get_as<double>(e, "wave.experiment", "record_stride", ex.record_stride);
        w.experiment = ex;
    }
    return w;
}

CapitalSection parse_capital(const json& obj) {
    reject_unknown(obj, "capital", {"top_fraction", "density_points", "from_simulation"});
    CapitalSection c;
    c.top_fraction = get_as<double>(obj, "capital", "top_fraction", c.top_fraction);
    c.density_points = get_as<int>(obj, "capital", "density_points", c.density_points);
    c.from_simulation = get_as<bool>(obj, "capital", "from_simulation", c.from_simulation);
    return c;
}

void apply_override(json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw config_error("--set", "expected key.path=value, got '" + assignment + "'");
    const std::string key_path = assignment.substr(0, eq);
    const std::string value_text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(value_text);
    } catch (const json::exception&) {
        value = value_text;  // bare strings are allowed unquoted
    }
    json* node = &root;
    std::istringstream keys(key_path);
    std::string key, next;
    std::getline(keys, key, '.');
    while (std::getline(keys, next, '.')) {
        node = &((*node)[key]);
        if (!node->is_object() && !node->is_null())
            throw config_error(key_path, "override path crosses a non-object value");
        key = next;
    }
    (*node)[key] = value;
}

json config_to_json(const ExperimentConfig& cfg);

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error("<config>", std::string("invalid JSON: ") + e.what());
    }
    for (const auto& o : overrides) apply_override(root, o);

    reject_unknown(root, "",
                   {"schema_version", "output", "profile", "sim", "pde", "wave", "capital",
                    "stability"});
    ExperimentConfig cfg;
    cfg.schema_version = get_as<int>(root, "", "schema_version", 1);
    if (cfg.schema_version != 1)
        throw config_error("schema_version", "this build understands version 1 only");
    if (root.contains("output")) {
        reject_unknown(root.at("output"), "output", {"dir"});
        cfg.out_dir = get_as<std::string>(root.at("output"), "output", "dir", cfg.out_dir);
    }
    if (root.contains("profile")) cfg.profile = parse_profile(root.at("profile"));
    if (root.contains("sim")) cfg.sim = parse_sim(root.at("sim"));
    if (root.contains("pde")) cfg.pde = parse_pde(root.at("pde"));
    if (root.contains("wave")) cfg.wave = parse_wave(root.at("wave"));
    if (root.contains("capital")) cfg.capital = parse_capital(root.at("capital"));
    if (root.contains("stability")) {
        reject_unknown(root.at("stability"), "stability", {"drift_tol"});
        cfg.stability.drift_tol =
            get_as<double>(root.at("stability"), "stability", "drift_tol", 1e-9);
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                   const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw config_error(path.string(), "cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), overrides);
}

namespace {

json law_to_json(const InitialLawConfig& l) {
    json j;
    switch (l.kind) {
        case InitialLawConfig::Kind::Point:
            j["kind"] = "point";
            j["at"] = l.at;
            break;
        case InitialLawConfig::Kind::Uniform:
            j["kind"] = "uniform";
            j["a"] = l.a;
            j["b"] = l.b;
            break;
        case InitialLawConfig::Kind::Gaussian:
            j["kind"] = "gaussian";
            j["mean"] = l.mean;
            j["variance"] = l.variance;
            break;
        case InitialLawConfig::Kind::Samples:
            j["kind"] = "samples";
            j["path"] = l.path;
            break;
    }
    return j;
}

json knots_to_json(const std::vector<std::pair<double, double>>& knots) {
    json arr = json::array();
    for (const auto& [u, v] : knots) arr.push_back(json::array({u, v}));
    return arr;
}

json config_to_json(const ExperimentConfig& cfg) {
    json root;
    root["schema_version"] = cfg.schema_version;
    root["output"]["dir"] = cfg.out_dir;
    json& p = root["profile"];
    switch (cfg.profile.kind) {
        case ProfileConfig::Kind::Atlas:
            p["kind"] = "atlas";
            p["n"] = cfg.profile.n;
            p["gamma"] = cfg.profile.gamma;
            break;
        case ProfileConfig::Kind::Explicit:
            p["kind"] = "explicit";
            p["drifts"] = cfg.profile.drifts;
            p["diffusions"] = cfg.profile.diffusions;
            break;
        case ProfileConfig::Kind::MeanField:
            p["kind"] = "meanfield";
            if (cfg.profile.n > 0) p["n"] = cfg.profile.n;
            p["b_knots"] = knots_to_json(cfg.profile.b_knots);
            p["sigma2_knots"] = knots_to_json(cfg.profile.sigma2_knots);
            break;
        case ProfileConfig::Kind::SmoothedAtlas:
            p["kind"] = "smoothed_atlas";
            if (cfg.profile.n > 0) p["n"] = cfg.profile.n;
            p["gamma"] = cfg.profile.gamma;
            p["width"] = cfg.profile.width;
            break;
    }
    if (cfg.sim) {
        json& s = root["sim"];
        s["n"] = cfg.sim->n;
        s["dt"] = cfg.sim->dt;
        s["t_end"] = cfg.sim->t_end;
        s["seed"] = cfg.sim->seed;
        s["initial_law"] = law_to_json(cfg.sim->initial_law);
        if (!cfg.sim->record_times.empty()) s["record_times"] = cfg.sim->record_times;
        if (cfg.sim->record_stride > 0.0) {
            s["record_stride"] = cfg.sim->record_stride;
            s["record_from"] = cfg.sim->record_from;
        }
        s["burn_in_fraction"] = cfg.sim->burn_in_fraction;
        s["output_mode"] =
            cfg.sim->output_mode == SimSection::OutputMode::Positions ? "positions" : "quantiles";
        s["quantile_levels"] = cfg.sim->quantile_levels;
    }
    if (cfg.pde) {
        json& d = root["pde"];
        d["x_min"] = cfg.pde->x_min;
        d["x_max"] = cfg.pde->x_max;
        d["nx"] = cfg.pde->nx;
        d["t_end"] = cfg.pde->t_end;
        if (!cfg.pde->record_times.empty()) d["record_times"] = cfg.pde->record_times;
        d["flux_order"] = cfg.pde->flux_order;
        if (!cfg.pde->restart_from.empty())
            d["restart_from"] = cfg.pde->restart_from;
        else
            d["initial_law"] = law_to_json(cfg.pde->initial_law);
    }
    if (cfg.wave) {
        json& w = root["wave"];
        w["target_mean"] = cfg.wave->target_mean;
        w["x_min"] = cfg.wave->x_min;
        w["x_max"] = cfg.wave->x_max;
        w["samples"] = cfg.wave->samples;
        if (cfg.wave->experiment) {
            json& e = w["experiment"];
            e["shifts"] = cfg.wave->experiment->shifts;
            e["weights"] = cfg.wave->experiment->weights;
            e["horizon"] = cfg.wave->experiment->horizon;
            e["x_min"] = cfg.wave->experiment->x_min;
            e["x_max"] = cfg.wave->experiment->x_max;
            e["nx"] = cfg.wave->experiment->nx;
            e["record_stride"] = cfg.wave->experiment->record_stride;
        }
    }
    if (cfg.capital) {
        json& c = root["capital"];
        c["top_fraction"] = cfg.capital->top_fraction;
        c["density_points"] = cfg.capital->density_points;
        c["from_simulation"] = cfg.capital->from_simulation;
    }
    root["stability"]["drift_tol"] = cfg.stability.drift_tol;
    return root;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
    return config_to_json(cfg).dump(2) + "\n";
}

Command parse_command(const std::string& name) {
    if (name == "simulate") return Command::Simulate;
    if (name == "stability") return Command::Stability;
    if (name == "pde") return Command::Pde;
    if (name == "wave") return Command::Wave;
    if (name == "capital") return Command::Capital;
    throw config_error("command", "expected simulate|stability|pde|wave|capital, got '" +
                                      name + "'");
}

// ---------------------------------------------------------------------------
// command execution
// ---------------------------------------------------------------------------

namespace {

std::filesystem::path out_path(const ExperimentConfig& cfg, const std::string& name) {
    return std::filesystem::path(cfg.out_dir) / name;
}

void write_provenance(Command cmd, const ExperimentConfig& cfg, RunResult& result) {
    const char* name = nullptr;
    switch (cmd) {
        case Command::Simulate: name = "simulate"; break;
        case Command::Stability: name = "stability"; break;
        case Command::Pde: name = "pde"; break;
        case Command::Wave: name = "wave"; break;
        case Command::Capital: name = "capital"; break;
    }
    const auto path = out_path(cfg, std::string(name) + ".provenance.json");
    atomic_write(path, serialize_config(cfg));
    result.outputs.push_back(path);
}

void run_simulate(const ExperimentConfig& cfg, RunResult& result) {
    if (!cfg.sim) throw config_error("sim", "the simulate command needs a sim section");
    const SimSection& s = *cfg.sim;
    const CoefficientProfile c = cfg.profile.finite(s.n);
    SimConfig sim;
    sim.n = s.n;
    sim.dt = s.dt;
    sim.t_end = s.t_end;
    sim.seed = s.seed;
    sim.initial_law = s.initial_law.build();
    sim.record_times = s.resolved_record_times();

    std::ostringstream os;
    os << "# time,com";
    if (s.output_mode == SimSection::OutputMode::Positions) {
        for (int k = 1; k <= s.n; ++k) os << ",x" << k;
    } else {
        for (double q : s.quantile_levels) os << ",q" << format_double(q);
    }
    os << "\n";
    simulate_visit(sim, c, [&](const ParticleState& state) {
        const auto obs = observables(state);
        os << format_double(state.t) << "," << format_double(obs.center_of_mass);
        if (s.output_mode == SimSection::OutputMode::Positions) {
            for (int k = 0; k < state.n(); ++k)
                os << "," << format_double(state.position_at_rank(k));
        } else {
            for (double q : s.quantile_levels)
                os << "," << format_double(empirical_quantile(state, q));
        }
        os << "\n";
    });
    const auto path = out_path(cfg, "sim.csv");
    atomic_write(path, os.str());
    result.outputs.push_back(path);
}

void run_stability(const ExperimentConfig& cfg, RunResult& result) {
    const CoefficientProfile c = cfg.profile.finite();
    const auto report = check_global_stability(c);
    const auto longtime = classify_long_time(c, cfg.stability.drift_tol);

    Table margins;
    margins.header = "m,alpha";
    for (std::size_t m = 0; m < report.margins.size(); ++m)
        margins.rows.push_back({static_cast<double>(m + 1), report.margins[m]});
    const auto margins_path = out_path(cfg, "margins.csv");
    write_table(margins_path, margins);
    result.outputs.push_back(margins_path);

    std::ostringstream clouds;
    clouds << "# first_rank,last_rank,avg_drift,cluster_count,recurrence\n";
    for (const auto& cl : longtime.clouds)
        clouds << cl.first_rank << "," << cl.last_rank << "," << format_double(cl.avg_drift)
               << "," << cl.cluster_count << ","
               << (cl.recurrence == Recurrence::Ergodic ? "ergodic" : "null-recurrent") << "\n";
    const auto clouds_path = out_path(cfg, "clouds.csv");
    atomic_write(clouds_path, clouds.str());
    result.outputs.push_back(clouds_path);

    std::ostringstream summary;
    summary << "globally_stable: " << (report.globally_stable ? "yes" : "no") << "\n";
    summary << "margins:";
    for (double a : report.margins) summary << " " << format_double(a);
    summary << "\n";
    summary << format_long_time_report(longtime);
    if (report.globally_stable) {
        try {
            const auto law = stationary_gap_law(c);
            Table gaps;
            gaps.header = "k,rate,mean_gap";
            for (std::size_t k = 0; k < law.rates.size(); ++k)
                gaps.rows.push_back(
                    {static_cast<double>(k + 1), law.rates[k], 1.0 / law.rates[k]});
            const auto gap_path = out_path(cfg, "gap_law.csv");
            write_table(gap_path, gaps);
            result.outputs.push_back(gap_path);
            summary << "gap_rates:";
            for (double r : law.rates) summary << " " << format_double(r);
            summary << "\n";
        } catch (const unsupported_variance& e) {
            summary << "gap_law: " << e.what() << "\n";
        }
    }
    const auto summary_path = out_path(cfg, "summary.txt");
    atomic_write(summary_path, summary.str());
    result.outputs.push_back(summary_path);
}

void run_pde(const ExperimentConfig& cfg, RunResult& result) {
    if (!cfg.pde) throw config_error("pde", "the pde command needs a pde section");
    const PdeSection& p = *cfg.pde;
    const MeanFieldProfile mf = cfg.profile.meanfield();
    GridCDF g = p.restart_from.empty()
                    ? init_grid(p.initial_law.build(), p.x_min, p.x_max, p.nx)
                    : read_grid(p.restart_from);
    std::vector<double> times = p.record_times;
    if (times.empty()) times.push_back(p.t_end);
    std::sort(times.begin(), times.end());
    EvolveOptions opts;
    opts.flux_order = p.flux_order;
    int index = 0;
    for (double t : times) {
        g = evolve(g, mf, t, opts);
        char name[32];
        std::snprintf(name, sizeof(name), "pde_%03d.csv", index++);
        const auto path = out_path(cfg, name);
        write_grid(path, g);
        result.outputs.push_back(path);
    }
}

void run_wave(const ExperimentConfig& cfg, RunResult& result) {
    if (!cfg.wave) throw config_error("wave", "the wave command needs a wave section");
    const WaveSection& w = *cfg.wave;
    const MeanFieldProfile mf = cfg.profile.meanfield();
    const WaveProfile wave(mf, w.target_mean);

    Table tab;
    tab.header = "x,phi";
    for (int i = 0; i < w.samples; ++i) {
        const double x = w.x_min + (w.x_max - w.x_min) * i / (w.samples - 1);
        tab.rows.push_back({x, wave.cdf(x)});
    }
    const auto wave_path = out_path(cfg, "wave.csv");
    write_table(wave_path, tab);
    result.outputs.push_back(wave_path);

    if (w.experiment) {
        const auto& ex = *w.experiment;
        if (ex.shifts.size() != ex.weights.size() || ex.shifts.empty())
            throw config_error("wave.experiment", "shifts and weights must match in size");
        double wsum = 0.0, msum = 0.0;
        for (std::size_t i = 0; i < ex.weights.size(); ++i) {
            wsum += ex.weights[i];
            msum += ex.weights[i] * ex.shifts[i];
        }
        if (std::abs(wsum - 1.0) > 1e-12)
            throw config_error("wave.experiment.weights", "weights must sum to 1");
        auto mixture = [&wave, &ex](double x) {
            double f = 0.0;
            for (std::size_t i = 0; i < ex.shifts.size(); ++i)
                f += ex.weights[i] * wave.cdf(x - ex.shifts[i]);
            return f;
        };
        std::vector<double> times;
        for (double t = 0.0; t <= ex.horizon * (1.0 + 1e-12); t += ex.record_stride)
            times.push_back(std::min(t, ex.horizon));
        const auto series = stability_experiment(mf, mixture, wave.mean() + msum, ex.horizon,
                                                 ex.x_min, ex.x_max, ex.nx, times, {},
                                                 wave.mean());
        Table st;
        st.header = "t,l1_distance";
        for (const auto& pt : series) st.rows.push_back({pt.t, pt.l1});
        const auto series_path = out_path(cfg, "stability_series.csv");
        write_table(series_path, st);
        result.outputs.push_back(series_path);
    }
}

void run_capital(const ExperimentConfig& cfg, RunResult& result) {
    if (!cfg.capital) throw config_error("capital", "the capital command needs a capital section");
    const CapitalSection& cap = *cfg.capital;
    const MeanFieldProfile mf = cfg.profile.meanfield();
    const PhaseResult phase = classify_phase(mf);

    std::optional<SlopeFit> fitted;
    if (cap.from_simulation) {
        if (!cfg.sim) throw config_error("sim", "capital.from_simulation needs a sim section");
        const SimSection& s = *cfg.sim;
        const CoefficientProfile c = cfg.profile.finite(s.n);
        SimConfig sim;
        sim.n = s.n;
        sim.dt = s.dt;
        sim.t_end = s.t_end;
        sim.seed = s.seed;
        sim.initial_law = s.initial_law.build();
        const double burn = s.burn_in_fraction * s.t_end;
        for (double t : s.resolved_record_times())
            if (t >= burn) sim.record_times.push_back(t);
        if (sim.record_times.empty()) sim.record_times.push_back(s.t_end);

        std::vector<double> avg_weights;
        int count = 0;
        simulate_visit(sim, c, [&](const ParticleState& state) {
            const auto curve = market_weights(state.positions);
            if (avg_weights.empty()) avg_weights.assign(curve.weights.size(), 0.0);
            for (std::size_t i = 0; i < curve.weights.size(); ++i)
                avg_weights[i] += curve.weights[i];
            ++count;
        });
        for (double& w : avg_weights) w /= count;
        const double total = std::accumulate(avg_weights.begin(), avg_weights.end(), 0.0);
        for (double& w : avg_weights) w /= total;
        CapitalCurve curve;
        curve.weights = avg_weights;
        for (std::size_t p = 0; p < avg_weights.size(); ++p) {
            curve.log_rank.push_back(std::log(static_cast<double>(p + 1)));
            curve.log_weight.push_back(std::log(avg_weights[p]));
        }
        fitted = loglog_slope(curve, cap.top_fraction);

        Table t;
        t.header = "rank,weight,log_rank,log_weight";
        for (int p = 0; p < curve.n(); ++p)
            t.rows.push_back({static_cast<double>(p + 1), curve.weights[static_cast<std::size_t>(p)],
                              curve.log_rank[static_cast<std::size_t>(p)],
                              curve.log_weight[static_cast<std::size_t>(p)]});
        const auto curve_path = out_path(cfg, "capital_curve.csv");
        write_table(curve_path, t);
        result.outputs.push_back(curve_path);
    }

    std::ostringstream ph;
    ph << "# lhs,rhs,label,theoretical_slope";
    if (fitted) ph << ",fitted_slope,fitted_std_error";
    ph << "\n";
    ph << format_double(phase.lhs) << "," << format_double(phase.rhs) << ",";
    switch (phase.label) {
        case Phase::Dilute: ph << "dilute"; break;
        case Phase::Aggregated: ph << "aggregated"; break;
        case Phase::Critical: ph << "critical"; break;
    }
    ph << "," << (phase.theoretical_slope ? format_double(*phase.theoretical_slope) : "nan");
    if (fitted)
        ph << "," << format_double(fitted->slope) << "," << format_double(fitted->std_error);
    ph << "\n";

    if (phase.label == Phase::Dilute) {
        std::vector<double> v(static_cast<std::size_t>(cap.density_points));
        for (int i = 0; i < cap.density_points; ++i)
            v[static_cast<std::size_t>(i)] = (i + 0.5) / cap.density_points;
        const auto density = stationary_capital_density(mf, v);
        Table t;
        t.header = "v,pi_st";
        for (std::size_t i = 0; i < v.size(); ++i)
            t.rows.push_back({v[i], density.density.density[i]});
        const auto density_path = out_path(cfg, "stationary_density.csv");
        write_table(density_path, t);
        result.outputs.push_back(density_path);
    } else if (phase.label == Phase::Aggregated) {
        ph << "# stationary capital law: Dirac mass at 0\n";
    } else {
        try {
            std::vector<double> probe{0.5};
            stationary_capital_density(mf, probe);
        } catch (const needs_detailed_analysis& e) {
            ph << "# " << e.what() << "\n";
        }
    }
    const auto phase_path = out_path(cfg, "phase.csv");
    atomic_write(phase_path, ph.str());
    result.outputs.push_back(phase_path);
}

}  // namespace

RunResult run_command(Command cmd, const ExperimentConfig& cfg) {
    RunResult result;
    switch (cmd) {
        case Command::Simulate: run_simulate(cfg, result); break;
        case Command::Stability: run_stability(cfg, result); break;
        case Command::Pde: run_pde(cfg, result); break;
        case Command::Wave: run_wave(cfg, result); break;
        case Command::Capital: run_capital(cfg, result); break;
    }
    write_provenance(cmd, cfg, result);
    return result;
}

}  // namespace ranklab
