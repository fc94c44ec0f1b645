#include "psas/scenario.hpp"

#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "psas/adiabaticity.hpp"
#include "psas/csv.hpp"
#include "psas/dressed.hpp"
#include "psas/phase.hpp"
#include "psas/propagator.hpp"
#include "psas/version.hpp"

namespace psas {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::vector<double> GridSpec::make() const {
    if (samples < 2) throw ConfigError("grid: samples must be >= 2");
    if (!(t1 > t0)) throw ConfigError("grid: t1 must exceed t0");
    std::vector<double> g(samples);
    for (int i = 0; i < samples; ++i) g[i] = t0 + (t1 - t0) * double(i) / double(samples - 1);
    g.back() = t1;
    return g;
}

std::vector<double> AxisSpec::make() const {
    if (count < 1) throw ConfigError("axis: count must be >= 1");
    if (count == 1) return {start};
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = start + (stop - start) * double(i) / double(count - 1);
    g.back() = stop;
    return g;
}

namespace {

void require_keys(const ojson& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("'" + path + "' must be an object");
    for (const auto& item : j.items())
        if (!allowed.contains(item.key()))
            throw ConfigError("unknown key '" + (path.empty() ? "" : path + ".") + item.key() + "'");
}

const ojson* find(const ojson& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double need_num(const ojson& j, const std::string& path, const char* key) {
    const ojson* v = find(j, key);
    if (!v || !v->is_number())
        throw ConfigError("key '" + path + "." + key + "' must be a number");
    return v->get<double>();
}

double opt_num(const ojson& j, const std::string& path, const char* key, double def) {
    const ojson* v = find(j, key);
    if (!v) return def;
    if (!v->is_number()) throw ConfigError("key '" + path + "." + key + "' must be a number");
    return v->get<double>();
}

int opt_int(const ojson& j, const std::string& path, const char* key, int def) {
    const ojson* v = find(j, key);
    if (!v) return def;
    if (!v->is_number_integer()) throw ConfigError("key '" + path + "." + key + "' must be an integer");
    return v->get<int>();
}

bool opt_bool(const ojson& j, const std::string& path, const char* key, bool def) {
    const ojson* v = find(j, key);
    if (!v) return def;
    if (!v->is_boolean()) throw ConfigError("key '" + path + "." + key + "' must be a boolean");
    return v->get<bool>();
}

std::string need_str(const ojson& j, const std::string& path, const char* key) {
    const ojson* v = find(j, key);
    if (!v || !v->is_string()) throw ConfigError("key '" + path + "." + key + "' must be a string");
    return v->get<std::string>();
}

std::string opt_str(const ojson& j, const std::string& path, const char* key,
                    const std::string& def) {
    const ojson* v = find(j, key);
    if (!v) return def;
    if (!v->is_string()) throw ConfigError("key '" + path + "." + key + "' must be a string");
    return v->get<std::string>();
}

Complex parse_complex(const ojson& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("'" + where + "' must be a [re, im] pair");
    return {v[0].get<double>(), v[1].get<double>()};
}

// key whitelisting happens at the enclosing block; these only read
GridSpec parse_grid(const ojson& j, const std::string& path, GridSpec defaults) {
    GridSpec g;
    g.t0 = opt_num(j, path, "t0", defaults.t0);
    g.t1 = need_num(j, path, "t1");
    g.samples = opt_int(j, path, "samples", defaults.samples);
    return g;
}

AxisSpec parse_axis(const ojson& j, const std::string& path) {
    AxisSpec a;
    a.start = need_num(j, path, "start");
    a.count = opt_int(j, path, "count", 1);
    a.stop = a.count == 1 ? a.start : need_num(j, path, "stop");
    return a;
}

SystemConfig parse_system(const ojson& j, StateSpec& initial) {
    require_keys(j, "system",
                 {"omega_g", "omega_e", "gamma_re", "gamma_im", "phi_g", "phi_e", "initial"});
    SystemConfig sys;
    sys.omega_g = need_num(j, "system", "omega_g");
    sys.omega_e = need_num(j, "system", "omega_e");
    sys.gamma_re = opt_num(j, "system", "gamma_re", 0.0);
    sys.gamma_im = opt_num(j, "system", "gamma_im", 0.0);
    sys.phi_g = opt_num(j, "system", "phi_g", 0.0);
    sys.phi_e = opt_num(j, "system", "phi_e", 0.0);
    initial = StateSpec::ground();
    if (const ojson* v = find(j, "initial")) {
        if (v->is_string()) {
            const std::string s = v->get<std::string>();
            if (s == "ground") initial = StateSpec::ground();
            else if (s == "excited") initial = StateSpec::excited();
            else throw ConfigError("system.initial: unknown state '" + s + "'");
        } else if (v->is_object()) {
            require_keys(*v, "system.initial", {"g", "e"});
            const ojson* g = find(*v, "g");
            const ojson* e = find(*v, "e");
            if (!g || !e) throw ConfigError("system.initial needs both 'g' and 'e'");
            initial = StateSpec::superposition(parse_complex(*g, "system.initial.g"),
                                               parse_complex(*e, "system.initial.e"));
        } else {
            throw ConfigError("system.initial must be a string or an object");
        }
    }
    sys.validate();
    return sys;
}

FieldConfig parse_field(const ojson& j) {
    require_keys(j, "field", {"carrier", "envelope", "phase", "floor"});
    FieldConfig f;
    f.carrier = need_num(j, "field", "carrier");
    const ojson* env = find(j, "envelope");
    if (!env) throw ConfigError("field.envelope block is required");
    require_keys(*env, "field.envelope", {"kind", "peak_rabi", "center", "width"});
    f.envelope_kind = envelope_kind_from_string(need_str(*env, "field.envelope", "kind"));
    f.peak_rabi = need_num(*env, "field.envelope", "peak_rabi");
    f.center = opt_num(*env, "field.envelope", "center", 0.0);
    f.width = opt_num(*env, "field.envelope", "width", 1.0);
    if (const ojson* ph = find(j, "phase")) {
        require_keys(*ph, "field.phase", {"kind", "offset", "chirp", "depth", "rate"});
        f.phase_kind = phase_kind_from_string(opt_str(*ph, "field.phase", "kind", "constant"));
        f.phase_offset = opt_num(*ph, "field.phase", "offset", 0.0);
        f.chirp = opt_num(*ph, "field.phase", "chirp", 0.0);
        f.mod_depth = opt_num(*ph, "field.phase", "depth", 0.0);
        f.mod_rate = opt_num(*ph, "field.phase", "rate", 0.0);
    }
    f.floor = opt_num(j, "field", "floor", 1e-9);
    f.validate();
    return f;
}

Wavepacket parse_wavepacket(const ojson& j) {
    require_keys(j, "interferogram.wavepacket", {"levels", "created_at", "phi1"});
    Wavepacket wp;
    const ojson* levels = find(j, "levels");
    if (!levels || !levels->is_array())
        throw ConfigError("interferogram.wavepacket.levels must be an array");
    for (const ojson& l : *levels) {
        require_keys(l, "interferogram.wavepacket.levels[]", {"omega", "amp"});
        WavepacketLevel level;
        level.omega = need_num(l, "interferogram.wavepacket.levels[]", "omega");
        const ojson* amp = find(l, "amp");
        if (!amp) throw ConfigError("wavepacket level needs 'amp'");
        level.amp = parse_complex(*amp, "interferogram.wavepacket.levels[].amp");
        wp.levels.push_back(level);
    }
    wp.created_at = opt_num(j, "interferogram.wavepacket", "created_at", 0.0);
    wp.initial_phase = opt_num(j, "interferogram.wavepacket", "phi1", 0.0);
    wp.validate();
    return wp;
}

SecondPulse parse_second(const ojson& j) {
    require_keys(j, "interferogram.second",
                 {"amplitude", "policy", "phi2", "locked_frequency"});
    SecondPulse s;
    s.amplitude = opt_num(j, "interferogram.second", "amplitude", 1.0);
    const std::string policy = opt_str(j, "interferogram.second", "policy", "fixed");
    if (policy == "fixed") s.policy = SecondPulse::Policy::Fixed;
    else if (policy == "locked") s.policy = SecondPulse::Policy::Locked;
    else throw ConfigError("interferogram.second.policy must be 'fixed' or 'locked'");
    s.phi2 = opt_num(j, "interferogram.second", "phi2", 0.0);
    s.locked_frequency = opt_num(j, "interferogram.second", "locked_frequency", 0.0);
    return s;
}

Scenario scenario_from_json(const ojson& j) {
    require_keys(j, "", {"name", "version", "system", "field", "run", "propagate", "dressed",
                         "adiabaticity", "phase", "berry", "interferogram", "sweep", "output"});
    Scenario sc;
    sc.name = opt_str(j, "", "name", "scenario");

    const ojson* system = find(j, "system");
    if (!system) throw ConfigError("scenario: 'system' block is required");
    sc.system = parse_system(*system, sc.initial);

    const ojson* field = find(j, "field");
    if (!field) throw ConfigError("scenario: 'field' block is required");
    sc.field = parse_field(*field);

    sc.run = need_str(j, "scenario", "run");
    static const std::set<std::string> runs{"propagate", "dressed", "adiabaticity", "phase",
                                            "berry", "interferogram", "sweep"};
    if (!runs.contains(sc.run)) throw ConfigError("scenario.run: unknown run '" + sc.run + "'");

    if (const ojson* p = find(j, "propagate")) {
        require_keys(*p, "propagate", {"t0", "t1", "samples", "tol", "second_order"});
        sc.propagate.grid = parse_grid(*p, "propagate", GridSpec{0.0, 1.0, 2000});
        sc.propagate.tol = opt_num(*p, "propagate", "tol", 1e-10);
        sc.propagate.second_order = opt_bool(*p, "propagate", "second_order", false);
    }
    if (const ojson* p = find(j, "dressed")) {
        require_keys(*p, "dressed", {"t0", "t1", "samples", "ic"});
        sc.dressed.grid = parse_grid(*p, "dressed", GridSpec{0.0, 1.0, 500});
        const std::string ic = opt_str(*p, "dressed", "ic", "ground");
        if (ic == "ground") sc.dressed.ic = InitialKind::Ground;
        else if (ic == "excited") sc.dressed.ic = InitialKind::Excited;
        else throw ConfigError("dressed.ic must be 'ground' or 'excited'");
    }
    if (const ojson* p = find(j, "adiabaticity")) {
        require_keys(*p, "adiabaticity", {"t0", "t1", "samples", "n_max", "threshold"});
        sc.adiabaticity.grid = parse_grid(*p, "adiabaticity", GridSpec{0.0, 1.0, 200});
        sc.adiabaticity.n_max = opt_int(*p, "adiabaticity", "n_max", 2);
        sc.adiabaticity.threshold = opt_num(*p, "adiabaticity", "threshold", 0.1);
    }
    if (const ojson* p = find(j, "phase")) {
        require_keys(*p, "phase", {"t0", "t1", "samples", "tol"});
        sc.phase.grid = parse_grid(*p, "phase", GridSpec{0.0, 1.0, 2000});
        sc.phase.tol = opt_num(*p, "phase", "tol", 1e-10);
    }
    if (const ojson* p = find(j, "berry")) {
        require_keys(*p, "berry", {"loop", "points", "direction"});
        sc.berry.loop = opt_str(*p, "berry", "loop", "cone");
        if (sc.berry.loop != "cone") throw ConfigError("berry.loop: only 'cone' is supported");
        sc.berry.points = opt_int(*p, "berry", "points", 1024);
        sc.berry.direction = opt_int(*p, "berry", "direction", 1);
        if (sc.berry.points < 8) throw ConfigError("berry.points must be >= 8");
        if (sc.berry.direction != 1 && sc.berry.direction != -1)
            throw ConfigError("berry.direction must be +1 or -1");
    }
    if (const ojson* p = find(j, "interferogram")) {
        require_keys(*p, "interferogram",
                     {"model", "scan", "tau", "axis", "fixed_tau", "wavepacket", "second",
                      "ramsey"});
        InterferogramParams& ip = sc.interferogram;
        ip.model = opt_str(*p, "interferogram", "model", "wavepacket");
        if (ip.model != "wavepacket" && ip.model != "ramsey")
            throw ConfigError("interferogram.model must be 'wavepacket' or 'ramsey'");
        ip.scan = opt_str(*p, "interferogram", "scan", "delay");
        static const std::set<std::string> scans{"delay", "locked_frequency", "phase_offset"};
        if (!scans.contains(ip.scan))
            throw ConfigError("interferogram.scan: unknown scan '" + ip.scan + "'");
        if (const ojson* tau = find(*p, "tau")) {
            require_keys(*tau, "interferogram.tau", {"start", "stop", "count"});
            ip.tau = parse_axis(*tau, "interferogram.tau");
        }
        if (const ojson* ax = find(*p, "axis")) {
            require_keys(*ax, "interferogram.axis", {"start", "stop", "count"});
            ip.axis = parse_axis(*ax, "interferogram.axis");
        }
        ip.fixed_tau = opt_num(*p, "interferogram", "fixed_tau", 0.0);
        if (const ojson* wp = find(*p, "wavepacket")) ip.wavepacket = parse_wavepacket(*wp);
        if (const ojson* s = find(*p, "second")) ip.second = parse_second(*s);
        if (const ojson* r = find(*p, "ramsey")) {
            require_keys(*r, "interferogram.ramsey", {"phi2_offset", "settle", "tol"});
            ip.ramsey_phi2_offset = opt_num(*r, "interferogram.ramsey", "phi2_offset", 0.0);
            ip.ramsey_settle = opt_num(*r, "interferogram.ramsey", "settle", 0.0);
            ip.ramsey_tol = opt_num(*r, "interferogram.ramsey", "tol", 1e-10);
        }
    }
    if (const ojson* p = find(j, "sweep")) {
        require_keys(*p, "sweep", {"run", "axes"});
        sc.sweep.run = need_str(*p, "sweep", "run");
        if (!runs.contains(sc.sweep.run) || sc.sweep.run == "sweep")
            throw ConfigError("sweep.run: unknown base run '" + sc.sweep.run + "'");
        const ojson* axes = find(*p, "axes");
        if (!axes || !axes->is_array()) throw ConfigError("sweep.axes must be an array");
        for (const ojson& a : *axes) {
            require_keys(a, "sweep.axes[]", {"key", "start", "stop", "count", "values"});
            SweepAxis axis;
            axis.key = need_str(a, "sweep.axes[]", "key");
            if (const ojson* vals = find(a, "values")) {
                if (!vals->is_array()) throw ConfigError("sweep.axes[].values must be an array");
                for (const ojson& v : *vals) {
                    if (!v.is_number()) throw ConfigError("sweep.axes[].values must be numbers");
                    axis.values.push_back(v.get<double>());
                }
            } else {
                axis.values = parse_axis(a, "sweep.axes[]").make();
            }
            if (axis.values.empty()) throw ConfigError("sweep axis '" + axis.key + "' is empty");
            sc.sweep.axes.push_back(axis);
        }
        if (sc.sweep.axes.empty() || sc.sweep.axes.size() > 2)
            throw ConfigError("sweep: between 1 and 2 axes are supported");
    } else if (sc.run == "sweep") {
        throw ConfigError("scenario: run 'sweep' requires a 'sweep' block");
    }
    // the run's own parameter block must be present (strict referencing)
    const std::string referenced = sc.run == "sweep" ? sc.sweep.run : sc.run;
    if (!find(j, referenced.c_str()))
        throw ConfigError("scenario: run '" + referenced + "' requires a '" + referenced +
                          "' block");

    if (const ojson* p = find(j, "output")) {
        require_keys(*p, "output", {"dir", "formats"});
        sc.output.dir = opt_str(*p, "output", "dir", "out");
        if (const ojson* formats = find(*p, "formats")) {
            if (!formats->is_array()) throw ConfigError("output.formats must be an array");
            sc.output.csv = false;
            sc.output.json = false;
            for (const ojson& f : *formats) {
                const std::string s = f.is_string() ? f.get<std::string>() : "";
                if (s == "csv") sc.output.csv = true;
                else if (s == "json") sc.output.json = true;
                else throw ConfigError("output.formats entries must be 'csv' or 'json'");
            }
        }
    }
    return sc;
}

ojson complex_json(Complex c) { return ojson::array({c.real(), c.imag()}); }

ojson scenario_to_json(const Scenario& sc) {
    ojson j;
    j["name"] = sc.name;
    j["version"] = kVersion;

    ojson system;
    system["omega_g"] = sc.system.omega_g;
    system["omega_e"] = sc.system.omega_e;
    system["gamma_re"] = sc.system.gamma_re;
    system["gamma_im"] = sc.system.gamma_im;
    system["phi_g"] = sc.system.phi_g;
    system["phi_e"] = sc.system.phi_e;
    switch (sc.initial.kind) {
        case StateSpec::Kind::Ground: system["initial"] = "ground"; break;
        case StateSpec::Kind::Excited: system["initial"] = "excited"; break;
        case StateSpec::Kind::Superposition:
            system["initial"] =
                ojson{{"g", complex_json(sc.initial.g)}, {"e", complex_json(sc.initial.e)}};
            break;
    }
    j["system"] = system;

    ojson field;
    field["carrier"] = sc.field.carrier;
    field["envelope"] = ojson{{"kind", to_string(sc.field.envelope_kind)},
                              {"peak_rabi", sc.field.peak_rabi},
                              {"center", sc.field.center},
                              {"width", sc.field.width}};
    field["phase"] = ojson{{"kind", to_string(sc.field.phase_kind)},
                           {"offset", sc.field.phase_offset},
                           {"chirp", sc.field.chirp},
                           {"depth", sc.field.mod_depth},
                           {"rate", sc.field.mod_rate}};
    field["floor"] = sc.field.floor;
    j["field"] = field;

    j["run"] = sc.run;
    j["propagate"] = ojson{{"t0", sc.propagate.grid.t0},
                           {"t1", sc.propagate.grid.t1},
                           {"samples", sc.propagate.grid.samples},
                           {"tol", sc.propagate.tol},
                           {"second_order", sc.propagate.second_order}};
    j["dressed"] = ojson{{"t0", sc.dressed.grid.t0},
                         {"t1", sc.dressed.grid.t1},
                         {"samples", sc.dressed.grid.samples},
                         {"ic", sc.dressed.ic == InitialKind::Ground ? "ground" : "excited"}};
    j["adiabaticity"] = ojson{{"t0", sc.adiabaticity.grid.t0},
                              {"t1", sc.adiabaticity.grid.t1},
                              {"samples", sc.adiabaticity.grid.samples},
                              {"n_max", sc.adiabaticity.n_max},
                              {"threshold", sc.adiabaticity.threshold}};
    j["phase"] = ojson{{"t0", sc.phase.grid.t0},
                       {"t1", sc.phase.grid.t1},
                       {"samples", sc.phase.grid.samples},
                       {"tol", sc.phase.tol}};
    j["berry"] = ojson{{"loop", sc.berry.loop},
                       {"points", sc.berry.points},
                       {"direction", sc.berry.direction}};

    ojson gram;
    gram["model"] = sc.interferogram.model;
    gram["scan"] = sc.interferogram.scan;
    gram["tau"] = ojson{{"start", sc.interferogram.tau.start},
                        {"stop", sc.interferogram.tau.stop},
                        {"count", sc.interferogram.tau.count}};
    gram["axis"] = ojson{{"start", sc.interferogram.axis.start},
                         {"stop", sc.interferogram.axis.stop},
                         {"count", sc.interferogram.axis.count}};
    gram["fixed_tau"] = sc.interferogram.fixed_tau;
    if (!sc.interferogram.wavepacket.levels.empty()) {
        ojson levels = ojson::array();
        for (const WavepacketLevel& l : sc.interferogram.wavepacket.levels)
            levels.push_back(ojson{{"omega", l.omega}, {"amp", complex_json(l.amp)}});
        gram["wavepacket"] = ojson{{"levels", levels},
                                   {"created_at", sc.interferogram.wavepacket.created_at},
                                   {"phi1", sc.interferogram.wavepacket.initial_phase}};
    }
    gram["second"] =
        ojson{{"amplitude", sc.interferogram.second.amplitude},
              {"policy",
               sc.interferogram.second.policy == SecondPulse::Policy::Fixed ? "fixed" : "locked"},
              {"phi2", sc.interferogram.second.phi2},
              {"locked_frequency", sc.interferogram.second.locked_frequency}};
    gram["ramsey"] = ojson{{"phi2_offset", sc.interferogram.ramsey_phi2_offset},
                           {"settle", sc.interferogram.ramsey_settle},
                           {"tol", sc.interferogram.ramsey_tol}};
    j["interferogram"] = gram;

    if (!sc.sweep.axes.empty()) {
        ojson axes = ojson::array();
        for (const SweepAxis& a : sc.sweep.axes)
            axes.push_back(ojson{{"key", a.key}, {"values", a.values}});
        j["sweep"] = ojson{{"run", sc.sweep.run}, {"axes", axes}};
    }

    ojson formats = ojson::array();
    if (sc.output.csv) formats.push_back("csv");
    if (sc.output.json) formats.push_back("json");
    j["output"] = ojson{{"dir", sc.output.dir}, {"formats", formats}};
    return j;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_table(const Table& table, const fs::path& dir, const std::string& stem,
                 const OutputSpec& output) {
    if (output.csv) {
        std::ofstream os(dir / (stem + ".csv"), std::ios::binary);
        CsvWriter csv(os, table.columns);
        for (const auto& row : table.rows) csv.row(row);
    }
    if (output.json) {
        ojson j;
        j["columns"] = table.columns;
        ojson rows = ojson::array();
        for (const auto& row : table.rows) rows.push_back(row);
        j["rows"] = rows;
        std::ofstream os(dir / (stem + ".json"), std::ios::binary);
        os << j.dump(2) << "\n";
    }
}

Table trajectory_table(const Trajectory& traj) {
    Table t;
    t.columns = {"t", "re_g", "im_g", "re_e", "im_e", "pop_g", "pop_e", "norm"};
    t.rows.reserve(traj.states.size());
    for (const BareState& s : traj.states) {
        const double pg = std::norm(s.g_amp);
        const double pe = std::norm(s.e_amp);
        t.rows.push_back({s.t, s.g_amp.real(), s.g_amp.imag(), s.e_amp.real(), s.e_amp.imag(),
                          pg, pe, pg + pe});
    }
    return t;
}

Trajectory run_propagation(const Scenario& sc, const PropagateParams& params) {
    const std::vector<double> grid = params.grid.make();
    const BareState init = initial_state(sc.system, sc.initial);
    if (params.second_order)
        return propagate_second_order(sc.system, sc.field, init,
                                      {params.grid.t0, params.grid.t1}, params.tol, grid);
    return propagate(sc.system, sc.field, init, {params.grid.t0, params.grid.t1}, params.tol,
                     grid);
}

struct DressedRun {
    std::vector<DressedQuantities> series;
    PsasComponents components;
};

DressedRun run_dressed(const Scenario& sc) {
    DressedRun run;
    const std::vector<double> grid = sc.dressed.grid.make();
    DressedOptions opt;
    opt.adiabaticity_n_max = sc.adiabaticity.n_max;
    opt.adiabaticity_threshold = sc.adiabaticity.threshold;
    run.series = dressed_series(sc.system, sc.field, grid, opt);
    run.components = psas_components(sc.system, sc.field, grid, sc.dressed.ic, opt);
    return run;
}

Table dressed_table(const DressedRun& run) {
    Table t;
    t.columns = {"t"};
    for (const char* name : {"dtw", "big_omega", "lambda_plus", "lambda_minus", "cos_w",
                             "sin_w", "omega_G", "omega_E", "omega_E_eff"}) {
        t.columns.push_back(std::string("re_") + name);
        t.columns.push_back(std::string("im_") + name);
    }
    for (const char* name : {"x_g_real", "x_g_virtual", "x_e_real", "x_e_virtual"}) {
        t.columns.push_back(std::string("re_") + name);
        t.columns.push_back(std::string("im_") + name);
    }
    for (std::size_t i = 0; i < run.series.size(); ++i) {
        const DressedQuantities& q = run.series[i];
        std::vector<double> row{q.t};
        for (Complex v : {q.dtw, q.big_omega, q.lambda_plus, q.lambda_minus, q.cos_w, q.sin_w,
                          q.omega_G, q.omega_E, q.omega_E_eff}) {
            row.push_back(v.real());
            row.push_back(v.imag());
        }
        for (Complex v : {run.components.g_real[i], run.components.g_virtual[i],
                          run.components.e_real[i], run.components.e_virtual[i]}) {
            row.push_back(v.real());
            row.push_back(v.imag());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

AdiabaticityReport run_adiabaticity(const Scenario& sc) {
    const std::vector<double> grid = sc.adiabaticity.grid.make();
    return adiabaticity_report(sc.system, sc.field, grid, sc.adiabaticity.n_max,
                               sc.adiabaticity.threshold);
}

void write_adiabaticity(const AdiabaticityReport& report, const fs::path& dir,
                        const OutputSpec& output) {
    ojson j;
    j["n_max"] = report.n_max;
    j["threshold"] = report.threshold;
    j["max_ratio"] = std::isfinite(report.max_ratio) ? ojson(report.max_ratio) : ojson(nullptr);
    j["pass"] = report.pass;
    j["worst"] = ojson{{"n", report.worst_n}, {"k", report.worst_k}, {"t", report.worst_t}};
    j["grid"] = report.grid;
    ojson entries = ojson::array();
    for (const RatioEntry& e : report.ratios) {
        ojson row;
        row["n"] = e.n;
        row["k"] = e.k;
        row["t"] = e.t;
        row["ratio"] = e.violated ? ojson(nullptr) : ojson(e.ratio);
        row["violated"] = e.violated;
        entries.push_back(row);
    }
    j["ratios"] = entries;
    {
        std::ofstream os(dir / "adiabaticity.json", std::ios::binary);
        os << j.dump(2) << "\n";
    }
    if (output.csv) {
        Table t;
        t.columns = {"n", "k", "t", "ratio", "violated"};
        for (const RatioEntry& e : report.ratios)
            t.rows.push_back({double(e.n), double(e.k), e.t, e.ratio, e.violated ? 1.0 : 0.0});
        OutputSpec csv_only;
        csv_only.csv = true;
        csv_only.json = false;
        write_table(t, dir, "adiabaticity", csv_only);
    }
}

double run_berry(const Scenario& sc) {
    const double dw = detuning(sc.system, sc.field.carrier);
    const double rabi = sc.field.peak_rabi;
    const double hyp = std::hypot(dw, rabi);
    if (hyp == 0.0) throw ConfigError("berry: detuning and peak_rabi are both zero");
    const double theta = std::atan2(rabi, dw);
    const int n = sc.berry.points;
    std::vector<Eigen::VectorXcd> loop;
    loop.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double phi =
            sc.berry.direction * 2.0 * std::numbers::pi * double(k) / double(n);
        Eigen::VectorXcd state(2);
        state << Complex(std::cos(0.5 * theta), 0.0),
            std::exp(kI * phi) * std::sin(0.5 * theta);
        loop.push_back(state);
    }
    return geometric_phase(loop);
}

Table interferogram_table(const Interferogram& gram) {
    Table t;
    t.columns = {"scan_value", "P_analytic", "P_propagated", "A1sq", "A2sq", "cross"};
    for (const InterferogramPoint& p : gram.points)
        t.rows.push_back({p.value, p.population,
                          p.propagated ? *p.propagated : std::nan(""), p.a1_sq, p.a2_sq,
                          p.cross});
    return t;
}

Interferogram run_interferogram(const Scenario& sc) {
    const InterferogramParams& ip = sc.interferogram;
    if (ip.model == "ramsey") {
        RamseyConfig cfg;
        cfg.pulse = sc.field;
        cfg.phi2_offset = ip.ramsey_phi2_offset;
        cfg.settle = ip.ramsey_settle;
        cfg.tol = ip.ramsey_tol;
        return ramsey_crosscheck(sc.system, cfg, ip.tau.make());
    }
    if (ip.wavepacket.levels.empty())
        throw ConfigError("interferogram.wavepacket block is required for this model");
    if (ip.scan == "delay") return fringe_scan(ip.wavepacket, ip.second, ip.tau.make());
    if (ip.scan == "locked_frequency")
        return locked_frequency_scan(ip.wavepacket, ip.second, ip.fixed_tau, ip.axis.make());
    return phase_offset_scan(ip.wavepacket, ip.second, ip.fixed_tau, ip.axis.make());
}

std::vector<std::string> summary_columns_for(const std::string& run) {
    if (run == "propagate") return {"final_pop_g", "final_pop_e", "final_norm"};
    if (run == "dressed") return {"sin2", "cos2", "max_adiabaticity_ratio"};
    if (run == "adiabaticity") return {"max_ratio", "pass"};
    if (run == "phase") return {"final_phi_total", "final_phi_dyn", "final_residual"};
    if (run == "berry") return {"geometric_phase"};
    return {"p_first", "visibility"};
}

// summary row of one sweep grid point; `sc.run` is the base run kind
std::vector<double> sweep_summary(const Scenario& sc) {
    if (sc.run == "propagate") {
        const Trajectory traj = run_propagation(sc, sc.propagate);
        const BareState& last = traj.states.back();
        const double pg = std::norm(last.g_amp);
        const double pe = std::norm(last.e_amp);
        return {pg, pe, pg + pe};
    }
    if (sc.run == "dressed") {
        const DressedRun run = run_dressed(sc);
        const DressedQuantities& q = run.series.back();
        return {std::norm(q.sin_w), std::norm(q.cos_w), run.components.max_adiabaticity_ratio};
    }
    if (sc.run == "adiabaticity") {
        const AdiabaticityReport report = run_adiabaticity(sc);
        return {report.max_ratio, report.pass ? 1.0 : 0.0};
    }
    if (sc.run == "phase") {
        const Trajectory traj = run_propagation(sc, sc.phase);
        const auto records = phase_records(traj, sc.system, sc.field);
        const PhaseRecord& last = records.back();
        return {last.total, last.dynamical, last.geometric_residual};
    }
    if (sc.run == "berry") {
        return {run_berry(sc)};
    }
    const Interferogram gram = run_interferogram(sc);
    double pmax = -1e300;
    double pmin = 1e300;
    for (const InterferogramPoint& p : gram.points) {
        pmax = std::max(pmax, p.population);
        pmin = std::min(pmin, p.population);
    }
    const double visibility = pmax + pmin > 0.0 ? (pmax - pmin) / (pmax + pmin) : 0.0;
    return {gram.points.front().population, visibility};
}

ojson* navigate(ojson& root, const std::string& key) {
    ojson* node = &root;
    std::size_t pos = 0;
    while (pos != std::string::npos) {
        const std::size_t dot = key.find('.', pos);
        const std::string part =
            dot == std::string::npos ? key.substr(pos) : key.substr(pos, dot - pos);
        if (!node->is_object() || !node->contains(part)) return nullptr;
        node = &(*node)[part];
        pos = dot == std::string::npos ? std::string::npos : dot + 1;
    }
    return node;
}

Table run_sweep(const Scenario& sc, int jobs) {
    const ojson base = scenario_to_json(sc);
    // verify the axes point at numeric leaves before spawning work
    for (const SweepAxis& axis : sc.sweep.axes) {
        ojson probe = base;
        ojson* leaf = navigate(probe, axis.key);
        if (!leaf || !leaf->is_number())
            throw ConfigError("sweep: key '" + axis.key + "' is not a numeric leaf");
    }

    std::vector<std::vector<double>> combos;
    if (sc.sweep.axes.size() == 1) {
        for (double v : sc.sweep.axes[0].values) combos.push_back({v});
    } else {
        for (double a : sc.sweep.axes[0].values)
            for (double b : sc.sweep.axes[1].values) combos.push_back({a, b});
    }

    Table table;
    for (const SweepAxis& axis : sc.sweep.axes) {
        std::string name = axis.key;
        for (char& c : name)
            if (c == '.') c = '_';
        table.columns.push_back(name);
    }
    const std::vector<std::string> summary = summary_columns_for(sc.sweep.run);
    table.columns.insert(table.columns.end(), summary.begin(), summary.end());
    table.rows.resize(combos.size());

    std::mutex first_error_mutex;
    std::exception_ptr first_error;

    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < combos.size(); i += stride) {
            try {
                ojson point = base;
                point["run"] = sc.sweep.run;
                point.erase("sweep");
                for (std::size_t a = 0; a < sc.sweep.axes.size(); ++a)
                    *navigate(point, sc.sweep.axes[a].key) = combos[i][a];
                const Scenario swept = scenario_from_json(point);
                const std::vector<double> values = sweep_summary(swept);
                std::vector<double> row = combos[i];
                row.insert(row.end(), values.begin(), values.end());
                table.rows[i] = std::move(row);
            } catch (...) {
                std::scoped_lock lock(first_error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const std::size_t n_threads =
        std::max<std::size_t>(1, std::min<std::size_t>(std::size_t(std::max(jobs, 1)),
                                                       combos.size()));
    if (n_threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_threads; ++w) pool.emplace_back(work, w, n_threads);
        for (std::thread& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return table;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("scenario parse error: ") + e.what());
    }
    return scenario_from_json(j);
}

Scenario parse_scenario_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open scenario file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << is.rdbuf();
    return parse_scenario_text(buffer.str());
}

std::string scenario_to_manifest(const Scenario& scenario) {
    return scenario_to_json(scenario).dump(2) + "\n";
}

int run_scenario(const fs::path& path, const std::string& subcommand,
                 const Overrides& overrides) {
    try {
        Scenario sc = parse_scenario_file(path);
        if (!subcommand.empty() && sc.run != subcommand)
            throw ConfigError("scenario run '" + sc.run + "' does not match subcommand '" +
                              subcommand + "'");
        if (overrides.out_dir) sc.output.dir = *overrides.out_dir;
        if (overrides.format) {
            if (*overrides.format == "csv") { sc.output.csv = true; sc.output.json = false; }
            else if (*overrides.format == "json") { sc.output.csv = false; sc.output.json = true; }
            else if (*overrides.format == "both") { sc.output.csv = true; sc.output.json = true; }
            else throw ConfigError("--format must be csv, json or both");
        }
        if (overrides.tol) {
            sc.propagate.tol = *overrides.tol;
            sc.phase.tol = *overrides.tol;
            sc.interferogram.ramsey_tol = *overrides.tol;
        }

        const fs::path dir(sc.output.dir);
        fs::create_directories(dir);
        {
            std::ofstream os(dir / "manifest.json", std::ios::binary);
            os << scenario_to_manifest(sc);
        }

        int status = 0;
        if (sc.run == "propagate") {
            write_table(trajectory_table(run_propagation(sc, sc.propagate)), dir, "propagate",
                        sc.output);
        } else if (sc.run == "dressed") {
            const DressedRun run = run_dressed(sc);
            if (!run.components.adiabaticity_ok) {
                std::cerr << "warning: adiabaticity violated on the dressed grid (max ratio "
                          << run.components.max_adiabaticity_ratio << ")\n";
                if (overrides.require_adiabatic) return 4;
            }
            write_table(dressed_table(run), dir, "dressed", sc.output);
        } else if (sc.run == "adiabaticity") {
            const AdiabaticityReport report = run_adiabaticity(sc);
            write_adiabaticity(report, dir, sc.output);
            status = report.pass ? 0 : 1;
        } else if (sc.run == "phase") {
            const Trajectory traj = run_propagation(sc, sc.phase);
            const auto records = phase_records(traj, sc.system, sc.field);
            Table t;
            t.columns = {"t", "phi_total", "phi_dyn", "residual"};
            for (const PhaseRecord& r : records)
                t.rows.push_back({r.t, r.total, r.dynamical, r.geometric_residual});
            write_table(t, dir, "phase", sc.output);
        } else if (sc.run == "berry") {
            const double phase = run_berry(sc);
            const double dw = detuning(sc.system, sc.field.carrier);
            const double cos_theta = dw / std::hypot(dw, sc.field.peak_rabi);
            ojson j{{"loop", sc.berry.loop},
                    {"points", sc.berry.points},
                    {"direction", sc.berry.direction},
                    {"cos_theta", cos_theta},
                    {"geometric_phase", phase}};
            {
                std::ofstream os(dir / "berry.json", std::ios::binary);
                os << j.dump(2) << "\n";
            }
            if (sc.output.csv) {
                Table t;
                t.columns = {"points", "direction", "cos_theta", "geometric_phase"};
                t.rows.push_back({double(sc.berry.points), double(sc.berry.direction), cos_theta,
                                  phase});
                OutputSpec csv_only;
                csv_only.csv = true;
                csv_only.json = false;
                write_table(t, dir, "berry", csv_only);
            }
        } else if (sc.run == "interferogram") {
            write_table(interferogram_table(run_interferogram(sc)), dir, "interferogram",
                        sc.output);
        } else if (sc.run == "sweep") {
            write_table(run_sweep(sc, overrides.jobs), dir, "sweep", sc.output);
        }
        return status;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace psas
