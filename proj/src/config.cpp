#include "pbb/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pbb/error.hpp"

namespace pbb {

namespace {

using json = nlohmann::ordered_json;

std::string stability_name(StabilityMethod m) {
    return m == StabilityMethod::linearized ? "linearized" : "integrate";
}

StabilityMethod stability_from_name(const std::string& field, const std::string& s) {
    if (s == "linearized") return StabilityMethod::linearized;
    if (s == "integrate") return StabilityMethod::integrate;
    throw ConfigError(field, "expected \"linearized\" or \"integrate\", got \"" + s + "\"");
}

/// Reads keys of one JSON object, remembering which were consumed.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void get(const std::string& key, double& out) {
        if (const json* v = find(key)) out = number(key, *v);
    }
    void get(const std::string& key, std::optional<double>& out) {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
            } else {
                out = number(key, *v);
            }
        }
    }
    void get(const std::string& key, int& out) {
        if (const json* v = find(key)) out = integer<int>(key, *v);
    }
    template <class T>
        requires std::is_unsigned_v<T> && (!std::is_same_v<T, bool>)
    void get(const std::string& key, T& out) {
        if (const json* v = find(key)) out = integer<T>(key, *v);
    }
    void get(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
            out = v->get<bool>();
        }
    }
    void get(const std::string& key, std::string& out) {
        if (const json* v = find(key)) out = string(key, *v);
    }
    std::optional<std::string> get_string(const std::string& key) {
        if (const json* v = find(key)) return string(key, *v);
        return std::nullopt;
    }
    void get(const std::string& key, GridSpec& out) {
        if (const json* v = find(key)) {
            Section s(*v, field(key));
            s.get("start", out.start);
            s.get("stop", out.stop);
            s.get("count", out.count);
            s.finish();
        }
    }

    std::string string(const std::string& key, const json& v) const {
        if (!v.is_string()) throw ConfigError(field(key), "expected a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.contains(it.key())) throw ConfigError(field(it.key()), "unknown key");
        }
    }

private:
    double number(const std::string& key, const json& v) const {
        if (!v.is_number()) throw ConfigError(field(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(field(key), "must be finite");
        return x;
    }

    template <class T>
    T integer(const std::string& key, const json& v) const {
        if (v.is_number_unsigned()) {
            const auto u = v.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
                throw ConfigError(field(key), "integer out of range");
            }
            return static_cast<T>(u);
        }
        if (v.is_number_integer()) {
            const auto s = v.get<std::int64_t>();
            if constexpr (std::is_unsigned_v<T>) {
                if (s < 0) throw ConfigError(field(key), "must be non-negative");
            } else {
                if (s < std::numeric_limits<T>::min() || s > std::numeric_limits<T>::max()) {
                    throw ConfigError(field(key), "integer out of range");
                }
            }
            return static_cast<T>(s);
        }
        throw ConfigError(field(key), "expected an integer");
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json grid_json(const GridSpec& g) { return json{{"start", g.start}, {"stop", g.stop}, {"count", g.count}}; }

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError(field, what);
}

}  // namespace

std::vector<double> GridSpec::values() const {
    std::vector<double> v(static_cast<std::size_t>(std::max(count, 0)));
    for (int k = 0; k < count; ++k) {
        v[static_cast<std::size_t>(k)] = count == 1 ? start : start + (stop - start) * k / static_cast<double>(count - 1);
    }
    if (count > 1) v.back() = stop;
    return v;
}

void RunConfig::validate() const {
    const auto& p = physics;
    const auto nonneg = [](double x) { return x >= 0.0; };
    require(nonneg(p.nu_g), "physics.nu_g", "must be >= 0");
    require(p.nu_kappa_fwhm > 0.0, "physics.nu_kappa_fwhm", "must be > 0");
    require(nonneg(p.nu_gamma1), "physics.nu_gamma1", "must be >= 0");
    require(nonneg(p.nu_gamma_phi1), "physics.nu_gamma_phi1", "must be >= 0");
    require(!p.nu_gamma_phi2 || nonneg(*p.nu_gamma_phi2), "physics.nu_gamma_phi2", "must be >= 0");
    require(nonneg(p.nu_eta), "physics.nu_eta", "must be >= 0");
    require(nonneg(p.n_th), "physics.n_th", "must be >= 0");
    require(p.n_levels >= 2, "physics.n_levels", "must be >= 2");
    require(!p.n_fock || *p.n_fock >= 2, "physics.n_fock", "must be >= 2");
    require(p.n_fock_multiplier > 0.0, "physics.n_fock_multiplier", "must be > 0");
    require(p.flux_divisor > 0.0, "physics.flux_divisor", "must be > 0");
    if (p.dephasing == DephasingModel::charge_dispersion) {
        require(p.ej_hz > 0.0, "physics.ej_hz", "must be > 0 for the charge-dispersion model");
        require(p.ec_hz > 0.0, "physics.ec_hz", "must be > 0 for the charge-dispersion model");
    }
    require(p.nu_qubit_detuning == 0.0, "physics.nu_qubit_detuning", "qubit detuning is not implemented; must be 0");

    const auto& t = trajectory;
    require(!t.t_final || *t.t_final > 0.0, "trajectory.t_final", "must be > 0");
    require(!t.sample_interval || *t.sample_interval > 0.0, "trajectory.sample_interval", "must be > 0");
    require(!t.discard_initial || *t.discard_initial >= 0.0, "trajectory.discard_initial", "must be >= 0");
    require(!t.dt_max || *t.dt_max > 0.0, "trajectory.dt_max", "must be > 0");
    require(t.step_tolerance > 0.0 && t.step_tolerance < 1e-2, "trajectory.step_tolerance", "must lie in (0, 1e-2)");
    require(t.n_trajectories >= 1, "trajectory.n_trajectories", "must be >= 1");
    const TrajectoryConfig tc = trajectory_config();
    require(tc.sample_interval <= tc.t_final, "trajectory.sample_interval", "must not exceed t_final");

    const auto& a = analysis;
    require(!a.reference_high || *a.reference_high > a.reference_low, "analysis.reference_high",
            "must exceed reference_low");
    require(a.k_sigma > 0.0, "analysis.k_sigma", "must be > 0");
    require(a.debounce >= 1, "analysis.debounce", "must be >= 1");
    require(a.n_sections >= 2, "analysis.n_sections", "must be >= 2");
    require(a.histogram_bins >= 3, "analysis.histogram_bins", "must be >= 3");
    require(nonneg(a.noise_photons), "analysis.noise_photons", "must be >= 0");
    require(a.prominence > 0.0 && a.prominence < 1.0, "analysis.prominence", "must lie in (0, 1)");
    require(a.valley > 0.0 && a.valley < 1.0, "analysis.valley", "must lie in (0, 1)");

    const auto& m = maxwell_bloch;
    require(m.level_count == 2 || m.level_count == 3, "maxwell_bloch.level_count", "must be 2 or 3");
    require(m.i_min > 0.0, "maxwell_bloch.i_min", "must be > 0");
    require(m.n_scan >= 1000, "maxwell_bloch.n_scan", "must be >= 1000");
    require(m.i_dim > 0.0 && m.i_bright >= m.i_dim, "maxwell_bloch.i_bright", "need 0 < i_dim <= i_bright");
    for (const auto& [name, g] : {std::pair<const char*, const GridSpec*>{"eta_hz", &m.eta_hz},
                                  {"delta_grid_hz", &m.delta_grid_hz},
                                  {"eta_grid_hz", &m.eta_grid_hz}}) {
        const std::string f = std::string("maxwell_bloch.") + name;
        require(g->count >= 1, f + ".count", "must be >= 1");
        require(g->count == 1 || g->stop > g->start, f + ".stop", "must exceed start");
    }
    require(m.eta_hz.start >= 0.0, "maxwell_bloch.eta_hz.start", "must be >= 0");
    require(m.eta_grid_hz.start >= 0.0, "maxwell_bloch.eta_grid_hz.start", "must be >= 0");

    const auto& c = calibration;
    require(nonneg(c.nu_kappa_fixed), "calibration.nu_kappa_fixed", "must be >= 0");
    require(nonneg(c.nu_kappa_int), "calibration.nu_kappa_int", "must be >= 0");
    require(!c.p_in_w || *c.p_in_w > 0.0, "calibration.p_in_w", "must be > 0");
    require(!output_dir.empty(), "output_dir", "must not be empty");
}

double RunConfig::kappa_field() const { return std::numbers::pi * physics.nu_kappa_fwhm; }

double RunConfig::g_over_kappa() const { return physics.nu_g / physics.nu_kappa_fwhm; }

SystemParams RunConfig::system_params() const {
    constexpr double tp = 2.0 * std::numbers::pi;
    SystemParams s;
    s.g1 = tp * physics.nu_g;
    s.kappa_field = kappa_field();
    s.gamma1 = tp * physics.nu_gamma1;
    s.gamma_phi1 = tp * physics.nu_gamma_phi1;
    s.eta = tp * physics.nu_eta;
    s.delta = tp * physics.nu_delta;
    s.delta_an = tp * physics.nu_delta_an;
    s.n_th = physics.n_th;
    s.n_levels = physics.n_levels;
    s.dephasing.model = physics.dephasing;
    s.dephasing.flux_divisor = physics.flux_divisor;
    s.dephasing.ej_hz = physics.ej_hz;
    s.dephasing.ec_hz = physics.ec_hz;
    s.dephasing.charge_include_ground = physics.charge_include_ground;
    return s;
}

int RunConfig::n_fock() const {
    if (physics.n_fock) return *physics.n_fock;
    const SystemParams s = system_params();
    const double expected = s.eta * s.eta / (s.kappa_field * s.kappa_field + s.delta * s.delta);
    // Relative slack keeps exact products such as 3 * 100 from rounding up.
    const double n = std::ceil(physics.n_fock_multiplier * expected * (1.0 - 1e-12));
    return std::max(8, static_cast<int>(std::min(n, 1e6)));
}

Dims RunConfig::dims() const { return Dims(physics.n_levels, n_fock()); }

TrajectoryConfig RunConfig::trajectory_config() const {
    const double k = kappa_field();
    TrajectoryConfig c;
    c.t_final = trajectory.t_final.value_or(50.0 / k);
    c.sample_interval = trajectory.sample_interval.value_or(1.0 / k);
    c.step_tolerance = trajectory.step_tolerance;
    c.dt_max = trajectory.dt_max.value_or(0.0);
    c.seed = trajectory.seed;
    return c;
}

double RunConfig::discard_initial() const { return trajectory.discard_initial.value_or(10.0 / kappa_field()); }

ThresholdSpec RunConfig::threshold_spec() const {
    ThresholdSpec t;
    t.mode = analysis.mode;
    t.reference_high = analysis.reference_high;
    t.reference_low = analysis.reference_low;
    t.k_sigma = analysis.k_sigma;
    t.debounce = analysis.debounce;
    return t;
}

MBParams RunConfig::mb_params() const {
    constexpr double tp = 2.0 * std::numbers::pi;
    MBParams p = MBParams::from_system(system_params(), maxwell_bloch.level_count);
    if (physics.nu_gamma_phi2) p.gamma_phi2 = tp * *physics.nu_gamma_phi2;
    if (physics.nu_delta_f) p.delta_f = tp * *physics.nu_delta_f;
    return p;
}

PhaseOptions RunConfig::phase_options() const {
    PhaseOptions o;
    o.i_dim = maxwell_bloch.i_dim;
    o.i_bright = maxwell_bloch.i_bright;
    o.n_scan = maxwell_bloch.n_scan;
    o.scan.i_min = maxwell_bloch.i_min;
    o.scan.stability.method = maxwell_bloch.stability;
    return o;
}

RunConfig config_from_json(const std::string& text, const std::string& source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source, std::string("JSON parse error: ") + e.what());
    }
    RunConfig c;
    Section r(root, "");
    if (const json* v = r.find("physics")) {
        Section s(*v, "physics");
        auto& p = c.physics;
        s.get("nu_g", p.nu_g);
        s.get("nu_kappa_fwhm", p.nu_kappa_fwhm);
        s.get("nu_gamma1", p.nu_gamma1);
        s.get("nu_gamma_phi1", p.nu_gamma_phi1);
        s.get("nu_gamma_phi2", p.nu_gamma_phi2);
        s.get("nu_eta", p.nu_eta);
        s.get("nu_delta", p.nu_delta);
        s.get("nu_delta_an", p.nu_delta_an);
        s.get("nu_delta_f", p.nu_delta_f);
        s.get("n_th", p.n_th);
        s.get("n_levels", p.n_levels);
        if (const json* nf = s.find("n_fock")) {
            if (nf->is_null() || (nf->is_string() && nf->get<std::string>() == "auto")) {
                p.n_fock.reset();
            } else if (nf->is_number_integer()) {
                const auto n = nf->get<std::int64_t>();
                require(n >= 2 && n <= 1'000'000, "physics.n_fock", "must lie in [2, 1e6]");
                p.n_fock = static_cast<int>(n);
            } else {
                throw ConfigError("physics.n_fock", "expected an integer, \"auto\" or null");
            }
        }
        s.get("n_fock_multiplier", p.n_fock_multiplier);
        if (const auto d = s.get_string("dephasing")) {
            try {
                p.dephasing = dephasing_model_from_string(*d);
            } catch (const Error& e) {
                throw ConfigError("physics.dephasing", e.what());
            }
        }
        s.get("flux_divisor", p.flux_divisor);
        s.get("ej_hz", p.ej_hz);
        s.get("ec_hz", p.ec_hz);
        s.get("charge_include_ground", p.charge_include_ground);
        s.get("nu_qubit_detuning", p.nu_qubit_detuning);
        s.finish();
    }
    if (const json* v = r.find("trajectory")) {
        Section s(*v, "trajectory");
        auto& t = c.trajectory;
        s.get("t_final", t.t_final);
        s.get("sample_interval", t.sample_interval);
        s.get("discard_initial", t.discard_initial);
        s.get("dt_max", t.dt_max);
        s.get("step_tolerance", t.step_tolerance);
        s.get("n_trajectories", t.n_trajectories);
        s.get("seed", t.seed);
        s.finish();
    }
    if (const json* v = r.find("analysis")) {
        Section s(*v, "analysis");
        auto& a = c.analysis;
        if (const auto m = s.get_string("threshold_mode")) {
            try {
                a.mode = threshold_mode_from_string(*m);
            } catch (const Error& e) {
                throw ConfigError("analysis.threshold_mode", e.what());
            }
        }
        s.get("reference_high", a.reference_high);
        s.get("reference_low", a.reference_low);
        s.get("k_sigma", a.k_sigma);
        s.get("debounce", a.debounce);
        s.get("n_sections", a.n_sections);
        s.get("histogram_bins", a.histogram_bins);
        s.get("noise_photons", a.noise_photons);
        s.get("prominence", a.prominence);
        s.get("valley", a.valley);
        s.finish();
    }
    if (const json* v = r.find("maxwell_bloch")) {
        Section s(*v, "maxwell_bloch");
        auto& m = c.maxwell_bloch;
        s.get("level_count", m.level_count);
        s.get("i_min", m.i_min);
        s.get("n_scan", m.n_scan);
        s.get("i_dim", m.i_dim);
        s.get("i_bright", m.i_bright);
        if (const auto st = s.get_string("stability")) m.stability = stability_from_name("maxwell_bloch.stability", *st);
        s.get("eta_hz", m.eta_hz);
        s.get("delta_grid_hz", m.delta_grid_hz);
        s.get("eta_grid_hz", m.eta_grid_hz);
        s.finish();
    }
    if (const json* v = r.find("calibration")) {
        Section s(*v, "calibration");
        auto& cal = c.calibration;
        s.get("s21_file", cal.s21_file);
        s.get("nu_kappa_fixed", cal.nu_kappa_fixed);
        s.get("nu_kappa_int", cal.nu_kappa_int);
        s.get("p_in_w", cal.p_in_w);
        s.finish();
    }
    r.get("output_dir", c.output_dir);
    r.finish();
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str(), path);
}

std::string config_to_json(const RunConfig& c) {
    const auto& p = c.physics;
    const auto& t = c.trajectory;
    const auto& a = c.analysis;
    const auto& m = c.maxwell_bloch;
    const auto& cal = c.calibration;
    json j;
    j["physics"] = json{
        {"nu_g", p.nu_g},
        {"nu_kappa_fwhm", p.nu_kappa_fwhm},
        {"nu_gamma1", p.nu_gamma1},
        {"nu_gamma_phi1", p.nu_gamma_phi1},
        {"nu_gamma_phi2", optional_number(p.nu_gamma_phi2)},
        {"nu_eta", p.nu_eta},
        {"nu_delta", p.nu_delta},
        {"nu_delta_an", p.nu_delta_an},
        {"nu_delta_f", optional_number(p.nu_delta_f)},
        {"n_th", p.n_th},
        {"n_levels", p.n_levels},
        {"n_fock", p.n_fock ? json(*p.n_fock) : json("auto")},
        {"n_fock_multiplier", p.n_fock_multiplier},
        {"dephasing", to_string(p.dephasing)},
        {"flux_divisor", p.flux_divisor},
        {"ej_hz", p.ej_hz},
        {"ec_hz", p.ec_hz},
        {"charge_include_ground", p.charge_include_ground},
        {"nu_qubit_detuning", p.nu_qubit_detuning},
    };
    j["trajectory"] = json{
        {"t_final", optional_number(t.t_final)},
        {"sample_interval", optional_number(t.sample_interval)},
        {"discard_initial", optional_number(t.discard_initial)},
        {"dt_max", optional_number(t.dt_max)},
        {"step_tolerance", t.step_tolerance},
        {"n_trajectories", t.n_trajectories},
        {"seed", t.seed},
    };
    j["analysis"] = json{
        {"threshold_mode", to_string(a.mode)},
        {"reference_high", optional_number(a.reference_high)},
        {"reference_low", a.reference_low},
        {"k_sigma", a.k_sigma},
        {"debounce", a.debounce},
        {"n_sections", a.n_sections},
        {"histogram_bins", a.histogram_bins},
        {"noise_photons", a.noise_photons},
        {"prominence", a.prominence},
        {"valley", a.valley},
    };
    j["maxwell_bloch"] = json{
        {"level_count", m.level_count},
        {"i_min", m.i_min},
        {"n_scan", m.n_scan},
        {"i_dim", m.i_dim},
        {"i_bright", m.i_bright},
        {"stability", stability_name(m.stability)},
        {"eta_hz", grid_json(m.eta_hz)},
        {"delta_grid_hz", grid_json(m.delta_grid_hz)},
        {"eta_grid_hz", grid_json(m.eta_grid_hz)},
    };
    j["calibration"] = json{
        {"s21_file", cal.s21_file},
        {"nu_kappa_fixed", cal.nu_kappa_fixed},
        {"nu_kappa_int", cal.nu_kappa_int},
        {"p_in_w", optional_number(cal.p_in_w)},
    };
    j["output_dir"] = c.output_dir;
    return j.dump(2) + "\n";
}

}  // namespace pbb
