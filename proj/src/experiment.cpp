#include "cmx/experiment.hpp"

#include "cmx/frequency_solver.hpp"
#include "cmx/msh_io.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace cmx
{
    using nlohmann::json;
    namespace fs = std::filesystem;
    constexpr double pi = std::numbers::pi;

    namespace
    {
        ExperimentKind parse_kind(const std::string& s)
        {
            if (s == "planewave")
                return ExperimentKind::Planewave;
            if (s == "waveguide")
                return ExperimentKind::Waveguide;
            if (s == "cavity")
                return ExperimentKind::Cavity;
            if (s == "trap")
                return ExperimentKind::Trap;
            if (s == "custom")
                return ExperimentKind::Custom;
            throw ConfigError("unknown experiment kind '" + s + "'");
        }

        SolverKind parse_solver(const std::string& s)
        {
            if (s == "cmcg")
                return SolverKind::Cmcg;
            if (s == "fw")
                return SolverKind::Fw;
            if (s == "fs")
                return SolverKind::Fs;
            throw ConfigError("unknown solver '" + s + "'");
        }
    } // namespace

    ExperimentConfig parse_config(const std::string& text)
    {
        json j;
        try
        {
            j = json::parse(text);
        }
        catch (const json::parse_error& e)
        {
            throw ConfigError(std::string("invalid JSON: ") + e.what());
        }

        ExperimentConfig c;
        try
        {
            c.name = j.value("name", std::string("custom"));
            c.kind = parse_kind(j.value("experiment", std::string("custom")));
            c.solver = parse_solver(j.value("solver", std::string("cmcg")));
            c.degree = j.value("degree", 1);
            if (c.degree != 1 && c.degree != 3)
                throw ConfigError("degree must be 1 or 3");

            if (j.contains("integrator"))
            {
                const std::string rk = j["integrator"];
                if (rk != "rk2" && rk != "rk4")
                    throw ConfigError("integrator must be rk2 or rk4");
                if ((c.degree == 1) != (rk == "rk2"))
                    throw ConfigError("degree " + std::to_string(c.degree) +
                                      " must pair with " + (c.degree == 1 ? "rk2" : "rk4"));
            }

            if (!j.contains("mesh"))
                throw ConfigError("missing mesh specification");
            const json& m = j["mesh"];
            const std::string mtype = m.value("type", std::string("cartesian"));
            if (mtype == "cartesian")
            {
                c.mesh.cartesian = true;
                c.mesh.nx = m.at("nx").get<int>();
                c.mesh.ny = m.at("ny").get<int>();
                if (c.mesh.nx < 1 || c.mesh.ny < 1)
                    throw ConfigError("mesh dimensions must be positive");
                if (m.contains("rect"))
                {
                    const auto r = m["rect"];
                    if (!r.is_array() || r.size() != 4)
                        throw ConfigError("mesh.rect must be [x0, y0, x1, y1]");
                    c.mesh.rect = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                                   r[3].get<double>()};
                }
            }
            else if (mtype == "msh")
            {
                c.mesh.cartesian = false;
                c.mesh.msh_path = m.at("path").get<std::string>();
            }
            else
                throw ConfigError("mesh.type must be 'cartesian' or 'msh'");

            if (j.contains("omega"))
                c.omega = j["omega"].get<double>();
            else if (j.contains("omega_over_pi"))
                c.omega = pi * j["omega_over_pi"].get<double>();

            c.theta_deg = j.value("theta_deg", 0.0);
            c.cg_tol = j.value("tol", 1e-4);
            c.max_periods = j.value("max_periods", 100);
            c.upwind = j.value("upwind", 2.0);
            c.output_dir = j.value("output_dir", std::string("."));

            if (j.contains("cavity"))
            {
                c.cavity_resonance_factor = j["cavity"].value("resonance_factor", 0.0);
                c.cavity_delta = j["cavity"].value("delta", 0.0);
                if (c.omega <= 0.0)
                    c.omega = std::numbers::sqrt2 * pi * (c.cavity_resonance_factor + c.cavity_delta);
            }
            if (j.contains("trap"))
            {
                const json& t = j["trap"];
                c.trap_shape = t.value("shape", std::string("square"));
                if (c.trap_shape != "square" && c.trap_shape != "circle")
                    throw ConfigError("trap.shape must be 'square' or 'circle'");
                c.trap_eps_inside = t.value("eps_inside", 4.0);
                if (t.contains("center"))
                    c.trap_center = {t["center"][0].get<double>(), t["center"][1].get<double>()};
                c.trap_sigma = t.value("sigma", 0.05);
            }

            if (!(c.omega > 0.0))
                throw ConfigError("no positive frequency given (omega / omega_over_pi / cavity)");
            if (c.max_periods < 1)
                throw ConfigError("max_periods must be positive");
            if (!(c.cg_tol > 0.0))
                throw ConfigError("tol must be positive");
        }
        catch (const json::exception& e)
        {
            throw ConfigError(std::string("bad config: ") + e.what());
        }
        return c;
    }

    ExperimentConfig load_config(const std::string& path)
    {
        std::ifstream in(path);
        if (!in.good())
            throw ConfigError("cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str());
    }

    std::vector<Preset> presets()
    {
        auto make = [](const std::string& name, const std::string& desc, const json& body,
                       bool needs_msh = false)
        {
            json j = body;
            j["name"] = name;
            return Preset{name, desc, j.dump(2), needs_msh};
        };

        std::vector<Preset> out;
        out.push_back(make(
            "planewave-10pi", "plane wave, omega = 10 pi, P1 on 32x32",
            {{"experiment", "planewave"},
             {"solver", "cmcg"},
             {"degree", 1},
             {"omega_over_pi", 10},
             {"theta_deg", 45.0},
             {"mesh", {{"type", "cartesian"}, {"nx", 32}, {"ny", 32}, {"rect", {0, 0, 1, 1}}}},
             {"max_periods", 100}}));
        out.push_back(make(
            "planewave-40pi", "plane wave, omega = 40 pi, P3 on 32x32",
            {{"experiment", "planewave"},
             {"solver", "cmcg"},
             {"degree", 3},
             {"omega_over_pi", 40},
             {"theta_deg", 45.0},
             {"mesh", {{"type", "cartesian"}, {"nx", 32}, {"ny", 32}, {"rect", {0, 0, 1, 1}}}},
             {"max_periods", 500}}));
        out.push_back(make(
            "waveguide-2pi", "half-open waveguide, omega = 2 pi, P1 on 64x16",
            {{"experiment", "waveguide"},
             {"solver", "cmcg"},
             {"degree", 1},
             {"omega_over_pi", 2},
             {"theta_deg", 30.0},
             {"mesh", {{"type", "cartesian"}, {"nx", 64}, {"ny", 16}, {"rect", {0, 0, 4, 1}}}},
             {"max_periods", 1000}}));
        out.push_back(make(
            "waveguide-6pi", "half-open waveguide, omega = 6 pi, P3 on 32x8",
            {{"experiment", "waveguide"},
             {"solver", "cmcg"},
             {"degree", 3},
             {"omega_over_pi", 6},
             {"theta_deg", 30.0},
             {"mesh", {{"type", "cartesian"}, {"nx", 32}, {"ny", 8}, {"rect", {0, 0, 4, 1}}}},
             {"max_periods", 1000}}));

        auto cavity = [&](const std::string& name, int factor, double delta, int degree, int nx)
        {
            return make(
                name,
                "closed cavity near omega_r = " + std::to_string(factor) + " sqrt(2) pi, delta = " +
                    std::to_string(delta),
                {{"experiment", "cavity"},
                 {"solver", "cmcg"},
                 {"degree", degree},
                 {"cavity", {{"resonance_factor", factor}, {"delta", delta}}},
                 {"mesh",
                  {{"type", "cartesian"}, {"nx", nx}, {"ny", nx}, {"rect", {0, 0, 1, 1}}}},
                 {"max_periods", 100}});
        };
        out.push_back(cavity("cavity-3r-d8", 3, 1.0 / 8.0, 1, 32));
        out.push_back(cavity("cavity-3r-d64", 3, 1.0 / 64.0, 1, 32));
        out.push_back(cavity("cavity-5r-d8", 5, 1.0 / 8.0, 3, 8));
        out.push_back(cavity("cavity-5r-d64", 5, 1.0 / 64.0, 3, 8));

        out.push_back(make(
            "trap-square",
            "dipole in a square trapping body (needs square_trap.msh, h = 0.05 over (-1,1)^2)",
            {{"experiment", "trap"},
             {"solver", "cmcg"},
             {"degree", 3},
             {"omega_over_pi", 10},
             {"trap",
              {{"shape", "square"}, {"eps_inside", 4.0}, {"center", {0.25, 0.0}}, {"sigma", 0.05}}},
             {"mesh", {{"type", "msh"}, {"path", "square_trap.msh"}}},
             {"max_periods", 1000}},
            true));
        out.push_back(make(
            "trap-circle",
            "dipole in a circular trapping body (needs circle_trap.msh, h = 0.02 over (-1,1)^2)",
            {{"experiment", "trap"},
             {"solver", "cmcg"},
             {"degree", 3},
             {"omega_over_pi", 20},
             {"trap",
              {{"shape", "circle"},
               {"eps_inside", 4.0},
               {"center", {std::numbers::sqrt2 / 4.0, 0.5 - std::numbers::sqrt2 / 4.0}},
               {"sigma", 0.05}}},
             {"mesh", {{"type", "msh"}, {"path", "circle_trap.msh"}}},
             {"max_periods", 1000}},
            true));
        return out;
    }

    namespace
    {
        struct Problem
        {
            Mesh mesh;
            std::unique_ptr<DgSpace> space;
            MaterialField materials;
            std::unique_ptr<DgOperator> op;
            SourceSpec sources;
            ComplexField S;
            TimeGrid grid;
            std::unique_ptr<ExactSolution> exact;
            std::unique_ptr<WeightedErrorMetric> metric;
        };

        Problem build_problem(const ExperimentConfig& c)
        {
            Problem p;
            const double tol = 1e-10;

            BoundaryClassifier classifier;
            switch (c.kind)
            {
            case ExperimentKind::Waveguide:
            {
                const double x1 = c.mesh.rect.x1;
                const double geom_tol =
                    tol * std::hypot(c.mesh.rect.width(), c.mesh.rect.height());
                classifier = [x1, geom_tol](const Vec2& x)
                { return std::abs(x.x - x1) <= geom_tol ? BoundaryTag::Impedance : BoundaryTag::PEC; };
                break;
            }
            case ExperimentKind::Cavity:
                classifier = [](const Vec2&) { return BoundaryTag::PEC; };
                break;
            default:
                classifier = [](const Vec2&) { return BoundaryTag::Impedance; };
                break;
            }

            if (c.mesh.cartesian)
                p.mesh = cartesian_mesh(c.mesh.nx, c.mesh.ny, c.mesh.rect, classifier);
            else
                p.mesh = import_msh(c.mesh.msh_path, classifier);

            p.space = std::make_unique<DgSpace>(p.mesh, c.degree);
            p.materials = MaterialField::uniform(p.mesh);
            if (c.kind == ExperimentKind::Trap)
            {
                const bool square = c.trap_shape == "square";
                for (int e = 0; e < p.mesh.n_elements(); ++e)
                {
                    const Vec2 cen = p.mesh.element_centroid(e);
                    const bool inside = square
                                            ? (std::abs(cen.x) <= 0.5 && std::abs(cen.y) <= 0.5)
                                            : (std::hypot(cen.x, cen.y) < 0.5);
                    if (inside)
                        p.materials.eps[e] = c.trap_eps_inside;
                }
            }

            DgOperator::Options opts;
            opts.upwind = c.upwind;
            p.op = std::make_unique<DgOperator>(*p.space, p.materials, opts);

            const double theta = c.theta_deg * pi / 180.0;
            p.sources.omega = c.omega;
            switch (c.kind)
            {
            case ExperimentKind::Planewave:
            case ExperimentKind::Custom:
            {
                p.exact = std::make_unique<ExactSolution>(plane_wave(theta, c.omega));
                p.sources.boundary_g = impedance_trace(*p.exact);
                break;
            }
            case ExperimentKind::Waveguide:
            {
                p.exact = std::make_unique<ExactSolution>(waveguide_series(theta, c.omega));
                // g = xi_theta on the impedance side (paper's data choice)
                const double dx = std::cos(theta), dy = std::sin(theta);
                const double om = c.omega;
                p.sources.boundary_g = [om, dx, dy](const Vec2& x, const Vec2&)
                { return std::exp(std::complex<double>(0.0, om * (dx * x.x + dy * x.y))); };
                break;
            }
            case ExperimentKind::Cavity:
            {
                p.exact = std::make_unique<ExactSolution>(cavity_series(c.omega));
                p.sources.volume_j = [](const Vec2&) { return std::complex<double>{1.0, 0.0}; };
                break;
            }
            case ExperimentKind::Trap:
            {
                const Vec2 cen = c.trap_center;
                const double s2 = c.trap_sigma * c.trap_sigma;
                p.sources.volume_j = [cen, s2](const Vec2& x) -> std::complex<double>
                {
                    const double r2 = (x.x - cen.x) * (x.x - cen.x) + (x.y - cen.y) * (x.y - cen.y);
                    return {std::exp(-r2 / s2), 0.0};
                };
                break;
            }
            }

            p.S = p.op->source_vector(p.sources);
            p.grid = cfl_steps(p.mesh, p.materials, c.omega, c.degree);
            if (p.exact)
                p.metric = std::make_unique<WeightedErrorMetric>(*p.space, p.materials, *p.exact);
            return p;
        }

        void write_history(const fs::path& path, const std::vector<ConvergenceRow>& rows)
        {
            std::ofstream out(path);
            if (!out.good())
                throw std::runtime_error("cannot write '" + path.string() + "'");
            out << "N err misfit\n";
            char buf[96];
            for (const auto& r : rows)
            {
                std::snprintf(buf, sizeof(buf), "%d %.12e %.12e\n", r.periods, r.err, r.misfit);
                out << buf;
            }
        }

        void write_solution(const fs::path& path, const ExperimentConfig& c, const Problem& p,
                            const ComplexField& field)
        {
            json j;
            j["experiment"] = c.name;
            j["solver"] = c.solver == SolverKind::Cmcg ? "cmcg"
                          : c.solver == SolverKind::Fw ? "fw"
                                                       : "fs";
            j["omega"] = c.omega;
            j["degree"] = c.degree;
            j["dof_layout"] = "element-major; per element the E, H1, H2 nodal blocks";
            j["nodes_per_element"] = p.space->nodes_per_elem();
            json mesh;
            mesh["n_vertices"] = p.mesh.n_vertices();
            mesh["n_elements"] = p.mesh.n_elements();
            json verts = json::array();
            for (const auto& v : p.mesh.vertices)
                verts.push_back({v.x, v.y});
            mesh["vertices"] = std::move(verts);
            json elems = json::array();
            for (const auto& t : p.mesh.elements)
                elems.push_back({t[0], t[1], t[2]});
            mesh["elements"] = std::move(elems);
            j["mesh"] = std::move(mesh);

            json re = json::array(), im = json::array();
            for (const auto& v : field)
            {
                re.push_back(v.real());
                im.push_back(v.imag());
            }
            j["dofs"]["re"] = std::move(re);
            j["dofs"]["im"] = std::move(im);

            std::ofstream out(path);
            if (!out.good())
                throw std::runtime_error("cannot write '" + path.string() + "'");
            out << j.dump() << "\n";
        }
    } // namespace

    RunSummary run_experiment(const ExperimentConfig& config, const RunOverrides& overrides)
    {
        ExperimentConfig c = config;
        if (!overrides.output_dir.empty())
            c.output_dir = overrides.output_dir;
        if (overrides.max_periods > 0)
            c.max_periods = overrides.max_periods;
        if (overrides.tol > 0.0)
            c.cg_tol = overrides.tol;

        Problem p = build_problem(c);
        fs::create_directories(c.output_dir);
        const fs::path dir(c.output_dir);

        RunSummary summary;

        // the trap has no analytic reference: measure against the FS solution
        ComplexField fs_solution;
        if (c.solver == SolverKind::Fs || c.kind == ExperimentKind::Trap)
        {
            FrequencySystem system(*p.op, p.sources);
            fs_solution = system.solve();
            if (p.metric)
                summary.fs_error = (*p.metric)(fs_solution);
        }

        std::function<double(const ComplexField&)> error_metric;
        if (p.metric)
        {
            const WeightedErrorMetric* m = p.metric.get();
            error_metric = [m](const ComplexField& u) { return (*m)(u); };
        }
        else if (!fs_solution.empty())
        {
            const DgOperator* op = p.op.get();
            const ComplexField* ref = &fs_solution;
            error_metric = [op, ref](const ComplexField& u) { return relative_error(*op, u, *ref); };
        }

        switch (c.solver)
        {
        case SolverKind::Fs:
        {
            summary.final_error = summary.fs_error;
            std::vector<ConvergenceRow> rows(1);
            rows[0].periods = 0;
            rows[0].err = summary.fs_error;
            rows[0].misfit = 0.0;
            summary.history = rows;
            summary.rows = 1;
            write_history(dir / "fs.txt", rows);
            write_solution(dir / "solution.json", c, p, fs_solution);
            break;
        }
        case SolverKind::Cmcg:
        {
            CmcgOptions opts;
            opts.tol = c.cg_tol;
            opts.max_iterations = std::max(1, c.max_periods / 2);
            opts.error_metric = error_metric;
            opts.filter_each_iteration = true;
            opts.residual_recompute_every = 10;
            CmcgResult res = cmcg_solve(*p.op, p.grid, p.S, opts);
            summary.history = res.history;
            summary.rows = static_cast<int>(res.history.size());
            if (!res.history.empty())
            {
                summary.final_error = res.history.back().err;
                summary.final_misfit = res.history.back().misfit;
            }
            write_history(dir / "cmcg.txt", res.history);
            write_solution(dir / "solution.json", c, p, res.filtered);
            break;
        }
        case SolverKind::Fw:
        {
            FwOptions opts;
            opts.max_periods = c.max_periods;
            opts.error_metric = error_metric;
            FwResult res = fw_solve(*p.op, p.grid, p.S, opts);
            summary.history = res.history;
            summary.rows = static_cast<int>(res.history.size());
            if (!res.history.empty())
            {
                summary.final_error = res.history.back().err;
                summary.final_misfit = res.history.back().misfit;
            }
            write_history(dir / "full_wave.txt", res.history);
            write_solution(dir / "solution.json", c, p, res.filtered);
            break;
        }
        }
        return summary;
    }

} // namespace cmx
