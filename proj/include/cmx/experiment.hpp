#ifndef CMX_EXPERIMENT_HPP
#define CMX_EXPERIMENT_HPP

#include "cmx/cmcg.hpp"
#include "cmx/reference_solutions.hpp"

#include <string>
#include <vector>

namespace cmx
{
    enum class ExperimentKind
    {
        Planewave,
        Waveguide,
        Cavity,
        Trap,
        Custom
    };

    enum class SolverKind
    {
        Cmcg,
        Fw,
        Fs
    };

    struct MeshSpec
    {
        bool cartesian = true;
        int nx = 0, ny = 0;
        Rect rect;
        std::string msh_path;
    };

    struct ExperimentConfig
    {
        std::string name = "custom";
        ExperimentKind kind = ExperimentKind::Custom;
        SolverKind solver = SolverKind::Cmcg;
        MeshSpec mesh;
        int degree = 1;
        double omega = 0.0;        // resolved frequency
        double theta_deg = 0.0;    // plane-wave / waveguide incidence angle
        double cg_tol = 1e-4;
        int max_periods = 100;
        double upwind = 2.0;
        std::string output_dir = ".";
        // cavity parameterization (omega = omega_r + sqrt(2) pi delta)
        double cavity_resonance_factor = 0.0;   // omega_r = factor * sqrt(2) * pi
        double cavity_delta = 0.0;
        // trap material
        double trap_eps_inside = 4.0;
        std::string trap_shape = "square";   // square | circle
        Vec2 trap_center{0.25, 0.0};
        double trap_sigma = 0.05;
    };

    /// Raised on malformed configuration (CLI exit code 1).
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Parses and validates a JSON config document (see README for the schema).
    ExperimentConfig parse_config(const std::string& json_text);
    ExperimentConfig load_config(const std::string& path);

    /// The paper's experiment catalogue: eight Cartesian presets plus the two
    /// msh-dependent trap presets.
    struct Preset
    {
        std::string name;
        std::string description;
        std::string config_json;
        bool needs_msh = false;
    };
    std::vector<Preset> presets();

    struct RunOverrides
    {
        std::string output_dir;   // empty = keep config value
        int max_periods = -1;     // <0 = keep
        double tol = -1.0;        // <0 = keep
    };

    struct RunSummary
    {
        double fs_error = -1.0;        // FS relative error vs exact (when available)
        double final_error = -1.0;     // last recorded solver error
        double final_misfit = -1.0;
        int rows = 0;
        std::vector<ConvergenceRow> history;
    };

    /// Runs one experiment: builds the mesh/materials/sources, solves with the
    /// configured solver, writes `cmcg.txt` or `full_wave.txt` and
    /// `solution.json` into the output directory. Deterministic for a fixed
    /// config. Throws ConfigError for bad configs and propagates solver errors.
    RunSummary run_experiment(const ExperimentConfig& config, const RunOverrides& overrides = {});

} // namespace cmx

#endif
