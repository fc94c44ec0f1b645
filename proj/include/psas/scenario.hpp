#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "psas/field.hpp"
#include "psas/interferometry.hpp"
#include "psas/system.hpp"

namespace psas {

// Declarative run configuration. Scenario files are strict JSON: every key
// must be known, every referenced block present. The emitted manifest.json is
// itself a valid scenario with all defaults materialized, so re-running it
// reproduces the outputs byte for byte.

struct GridSpec {
    double t0 = 0.0;
    double t1 = 1.0;
    int samples = 2000;
    std::vector<double> make() const;
};

struct AxisSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
    std::vector<double> make() const;
};

struct PropagateParams {
    GridSpec grid;
    double tol = 1e-10;
    bool second_order = false;
};

struct DressedParams {
    GridSpec grid{0.0, 1.0, 500};
    InitialKind ic = InitialKind::Ground;
};

struct AdiabaticityParams {
    GridSpec grid{0.0, 1.0, 200};
    int n_max = 2;
    double threshold = 0.1;
};

struct BerryParams {
    std::string loop = "cone";
    int points = 1024;
    int direction = 1;
};

struct InterferogramParams {
    std::string model = "wavepacket";  ///< "wavepacket" | "ramsey"
    std::string scan = "delay";        ///< "delay" | "locked_frequency" | "phase_offset"
    AxisSpec tau{0.0, 1.0, 100};
    AxisSpec axis{0.0, 1.0, 100};  ///< scanned axis for the non-delay scans
    double fixed_tau = 0.0;
    Wavepacket wavepacket;
    SecondPulse second;
    double ramsey_phi2_offset = 0.0;
    double ramsey_settle = 0.0;
    double ramsey_tol = 1e-10;
};

struct SweepAxis {
    std::string key;
    std::vector<double> values;
};

struct SweepParams {
    std::string run;
    std::vector<SweepAxis> axes;
};

struct OutputSpec {
    std::string dir = "out";
    bool csv = true;
    bool json = false;
};

struct Scenario {
    std::string name;
    SystemConfig system;
    StateSpec initial;
    FieldConfig field;
    std::string run;
    PropagateParams propagate;
    DressedParams dressed;
    AdiabaticityParams adiabaticity;
    PropagateParams phase;
    BerryParams berry;
    InterferogramParams interferogram;
    SweepParams sweep;
    OutputSpec output;
};

struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<std::string> format;  ///< csv | json | both
    std::optional<double> tol;
    int jobs = 1;
    bool require_adiabatic = false;
};

Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario_file(const std::filesystem::path& path);
std::string scenario_to_manifest(const Scenario& scenario);

/// Executes the scenario and writes one data file per declared format plus
/// manifest.json. Returns the process exit status: 0 success, 1 adiabaticity
/// report failed, 2 parse/validation error, 3 numerical error, 4 adiabatic
/// gate tripped. `subcommand`, when nonempty, must match the scenario's run.
int run_scenario(const std::filesystem::path& path, const std::string& subcommand = {},
                 const Overrides& overrides = {});

}  // namespace psas
