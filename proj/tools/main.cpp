// qcfield: command-line front end for the quasi-continuum field library.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcf/defectcell.hpp"
#include "qcf/elastic.hpp"
#include "qcf/errors.hpp"
#include "qcf/homogenized.hpp"
#include "qcf/kernelfit.hpp"
#include "qcf/report.hpp"
#include "qcf/unitcell.hpp"

using nlohmann::json;

namespace {

struct Params {
    // shared model/material parameters
    double lambda = 1.0 / 6.0;
    double alpha = 0.1629;
    double beta = -0.0509;
    double gamma = 0.9449;
    double a0 = 7.5;
    double Z = 4.0;
    double sigma = 0.0;  // 0 -> lattice default
    int N = 32;
    std::string lattice = "fcc";
    std::string mode = "nucleus";
    double h = 0.0;  // 0 -> default 1e-3 * |F0|
    // defect parameters
    double rho = 1.0;
    double r0 = 3.75;
    double R0 = 22.5;
    double r_min = 0.0;  // 0 -> 1.2 * r0
    double r_max = 75.0;
    int points = 40;
    std::string r_list = "1,5,10";
    // elastic parameters
    double mu = 1.0;
    double kappa = 1.0;
    double sigma0 = 1.0;
    // kernel fit
    std::string samples_path;
    int m = 1;
    unsigned seed = 0;
    // plumbing
    std::string out_dir = ".";
    std::string format = "csv,json,svg";
    std::string config_path;
};

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw qcf::ValidationError("empty numeric list: " + csv);
    return out;
}

bool wants(const Params& p, const std::string& fmt) {
    return ("," + p.format + ",").find("," + fmt + ",") != std::string::npos;
}

qcf::UnitCellSpec make_spec(const Params& p) {
    qcf::UnitCellSpec spec = p.lattice == "sc"     ? qcf::UnitCellSpec::simple_cubic(p.a0)
                             : p.lattice == "fcc" ? qcf::UnitCellSpec::fcc(p.a0)
                                                   : throw qcf::ValidationError(
                                                         "unknown lattice: " + p.lattice);
    spec.Z = p.Z;
    spec.lambda = p.lambda;
    spec.N = p.N;
    if (p.sigma > 0.0) spec.sigma_nuc = p.sigma;
    if (p.mode == "nucleus")
        spec.mode = qcf::SourceMode::regularized_nucleus;
    else if (p.mode == "jellium")
        spec.mode = qcf::SourceMode::uniform_background;
    else
        throw qcf::ValidationError("unknown source mode: " + p.mode);
    return spec;
}

// Artifact writer that accumulates (path, hash) pairs for the manifest.
struct Outputs {
    std::string dir;
    std::vector<std::pair<std::string, std::string>> files;

    std::string emit(const std::string& name, const std::string& content) {
        const std::string path = (std::filesystem::path(dir) / name).string();
        qcf::write_file(path, content);
        files.emplace_back(name, qcf::fnv64_hex(content));
        return path;
    }
};

json params_json(const Params& p, const std::string& subcommand) {
    json j;
    j["subcommand"] = subcommand;
    j["lambda"] = p.lambda;
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["gamma"] = p.gamma;
    j["a0"] = p.a0;
    j["Z"] = p.Z;
    j["sigma"] = p.sigma;
    j["N"] = p.N;
    j["lattice"] = p.lattice;
    j["mode"] = p.mode;
    j["h"] = p.h;
    j["rho"] = p.rho;
    j["r0"] = p.r0;
    j["R0"] = p.R0;
    j["r-min"] = p.r_min;
    j["r-max"] = p.r_max;
    j["points"] = p.points;
    j["r-list"] = p.r_list;
    j["mu"] = p.mu;
    j["kappa"] = p.kappa;
    j["sigma0"] = p.sigma0;
    j["samples"] = p.samples_path;
    j["m"] = p.m;
    j["seed"] = p.seed;
    j["out"] = p.out_dir;
    j["format"] = p.format;
    return j;
}

void load_config(Params& p, const json& cfg) {
    const json& src = cfg.contains("parameters") ? cfg.at("parameters") : cfg;
    auto get = [&](const char* key, auto& field) {
        if (src.contains(key)) field = src.at(key).template get<std::decay_t<decltype(field)>>();
    };
    get("lambda", p.lambda);
    get("alpha", p.alpha);
    get("beta", p.beta);
    get("gamma", p.gamma);
    get("a0", p.a0);
    get("Z", p.Z);
    get("sigma", p.sigma);
    get("N", p.N);
    get("lattice", p.lattice);
    get("mode", p.mode);
    get("h", p.h);
    get("rho", p.rho);
    get("r0", p.r0);
    get("R0", p.R0);
    get("r-min", p.r_min);
    get("r-max", p.r_max);
    get("points", p.points);
    get("r-list", p.r_list);
    get("mu", p.mu);
    get("kappa", p.kappa);
    get("sigma0", p.sigma0);
    get("samples", p.samples_path);
    get("m", p.m);
    get("seed", p.seed);
    get("format", p.format);
}

void run_unitcell_solve(const Params& p, Outputs& out) {
    const qcf::UnitCellSpec spec = make_spec(p);
    const qcf::ElectronicFields fields = qcf::solve_unit_cell(spec);
    const qcf::CellMoments mom = qcf::moments(fields, spec);
    json j;
    j["alpha"] = mom.alpha;
    j["beta"] = mom.beta;
    j["gamma"] = mom.gamma;
    j["W"] = mom.W;
    j["volume"] = fields.volume;
    j["residual_u"] = fields.residual_u;
    j["residual_phi"] = fields.residual_phi;
    j["neutrality"] = fields.neutrality;
    j["iterations"] = fields.iterations;
    out.emit("unitcell_solve.json", j.dump(2) + "\n");
}

void run_unitcell_stiffness(const Params& p, Outputs& out) {
    const qcf::UnitCellSpec spec = make_spec(p);
    const double h = p.h > 0.0 ? p.h : 1e-3 * spec.F0.norm();
    const qcf::ElasticTensors t = qcf::stiffness_fd(spec, h);
    const qcf::IsotropicModuli iso = qcf::isotropic_moduli(t);
    json j;
    j["h"] = t.h;
    j["C"] = std::vector<double>(t.C.begin(), t.C.end());
    std::vector<double> bflat;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) bflat.push_back(t.B(i, k));
    j["B"] = bflat;
    j["mu_voigt"] = iso.mu;
    j["kappa_voigt"] = iso.kappa_b;
    out.emit("unitcell_stiffness.json", j.dump(2) + "\n");
}

void run_greens(const Params& p, Outputs& out) {
    const qcf::HomogenizedModel model = qcf::build_model(p.lambda, p.alpha, p.gamma);
    const std::vector<double> rs = parse_list(p.r_list);
    std::vector<std::vector<double>> rows;
    for (double r : rs) rows.push_back({r, qcf::green_u(model, r), qcf::green_phi(model, r)});
    if (wants(p, "csv"))
        out.emit("greens.csv", qcf::csv_table({"r_bohr", "E_u", "E_phi"}, rows));
    json j;
    j["regime"] = qcf::to_string(model.regime);
    j["l0"] = model.l0;
    j["l1_re"] = model.l1.real();
    j["l1_im"] = model.l1.imag();
    j["k_plus"] = model.k_plus;
    j["k_minus"] = model.k_minus;
    j["decay_rate"] = qcf::decay_summary(model).rate;
    if (wants(p, "json")) out.emit("greens.json", j.dump(2) + "\n");
}

void run_defect_sweep(const Params& p, Outputs& out, const char* stem) {
    const qcf::HomogenizedModel model = qcf::build_model(p.lambda, p.alpha, p.gamma);
    const double lo = p.r_min > 0.0 ? p.r_min : 1.2 * p.r0;
    const std::vector<double> grid = qcf::log_spaced(lo, p.r_max, p.points);
    const qcf::SweepResult sweep = qcf::cell_size_sweep(model, p.rho, p.r0, grid);

    std::vector<std::vector<double>> rows;
    std::vector<double> xs, ys;
    for (const auto& row : sweep.rows) {
        if (!row.ok) continue;
        rows.push_back({row.R0, row.R0 / p.a0, row.energy, row.rel_error});
        xs.push_back(row.R0 / p.a0);
        ys.push_back(row.rel_error);
    }
    if (wants(p, "csv"))
        out.emit(std::string(stem) + ".csv",
                 qcf::csv_table({"R0_bohr", "R0_over_a0", "E_es_hartree", "rel_error"}, rows));
    json j;
    j["E_inf"] = sweep.energy_infinite;
    j["R0_at_1pct"] = sweep.R0_at_1pct;
    j["k_plus"] = model.k_plus;
    j["k_minus"] = model.k_minus;
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["gamma"] = p.gamma;
    j["lambda"] = p.lambda;
    if (wants(p, "json")) out.emit(std::string(stem) + ".json", j.dump(2) + "\n");
    if (wants(p, "svg"))
        out.emit(std::string(stem) + ".svg",
                 qcf::svg_line_chart_logy("Cell-size error of the electrostatic defect energy",
                                          "R0 / a0", "relative error", xs, ys));
}

void run_defect_energy(const Params& p, Outputs& out) {
    const qcf::HomogenizedModel model = qcf::build_model(p.lambda, p.alpha, p.gamma);
    const qcf::SphericalDefect defect{p.rho, p.r0, p.R0};
    const qcf::RadialDefectSolution sol = qcf::solve_coefficients(model, defect);
    json j;
    j["E_es"] = qcf::energy_es(sol);
    j["E_es_inf"] = qcf::energy_es_infinite(model, defect);
    j["varsigma"] = sol.varsigma;
    j["flux_residual"] = qcf::flux_identity_residual(sol);
    j["condition"] = sol.condition;
    j["u_center"] = qcf::field_u(sol, 0.0);
    j["phi_center"] = qcf::field_phi(sol, 0.0);
    out.emit("defect_energy.json", j.dump(2) + "\n");
}

void run_elastic(const Params& p, Outputs& out) {
    const qcf::ElasticSpec spec{p.mu, p.kappa, p.sigma0, p.rho, p.r0, p.R0};
    const qcf::Thetas t = qcf::solve_thetas(spec);
    json j;
    j["theta1"] = t.theta1;
    j["theta2"] = t.theta2;
    j["theta3"] = t.theta3;
    j["E_el"] = qcf::energy_el(spec);
    j["E_el_infinity"] = qcf::energy_el_infinite(spec);
    j["rel_error"] = qcf::elastic_rel_error(spec);
    out.emit("elastic.json", j.dump(2) + "\n");
}

void run_kernel_fit(const Params& p, Outputs& out) {
    if (p.samples_path.empty()) throw qcf::ValidationError("--samples is required");
    qcf::KernelSamples samples;
    samples.provenance = "table:" + p.samples_path;
    std::istringstream in(qcf::read_file(p.samples_path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!line.empty() && (std::isalpha(static_cast<unsigned char>(line[0])))) continue;
        std::stringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ','))
            throw qcf::ValidationError("bad sample row: " + line);
        samples.k.push_back(std::stod(a));
        samples.khat.push_back(std::stod(b));
    }
    qcf::FitOptions opts;
    opts.seed = p.seed;
    const qcf::KernelFit fit = qcf::fit_partial_fractions(samples, p.m, opts);
    json j;
    j["m"] = fit.m;
    j["residual"] = fit.residual;
    j["residual_warning"] = fit.residual_warning;
    j["pairs"] = json::array();
    for (const auto& t : fit.terms) {
        j["pairs"].push_back({{"P_re", t.P.real()},
                              {"P_im", t.P.imag()},
                              {"Q_re", t.Q.real()},
                              {"Q_im", t.Q.imag()}});
    }
    out.emit("kernel_fit.json", j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    Params p;

    // --config is resolved before CLI11 so explicit flags override it.
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--config") p.config_path = argv[i + 1];
    std::string cfg_subcommand;
    if (!p.config_path.empty()) {
        try {
            const json cfg = json::parse(qcf::read_file(p.config_path));
            load_config(p, cfg);
            const json& src = cfg.contains("parameters") ? cfg.at("parameters") : cfg;
            if (src.contains("subcommand")) cfg_subcommand = src.at("subcommand");
        } catch (const json::exception& e) {
            std::cerr << "error: bad config file: " << e.what() << "\n";
            return 2;
        } catch (const qcf::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return e.exit_code();
        }
    }

    CLI::App app{"Field-theoretic quasi-continuum analysis of orbital-free DFT"};
    app.require_subcommand(0, 1);
    app.fallthrough();
    app.add_option("--config", p.config_path, "JSON config or manifest to load defaults from");
    app.add_option("--out", p.out_dir, "output directory");
    app.add_option("--format", p.format, "comma list of csv,json,svg");
    app.add_option("--seed", p.seed, "random seed for stochastic fit restarts");

    auto add_model_flags = [&](CLI::App* c) {
        c->add_option("--lambda", p.lambda);
        c->add_option("--alpha", p.alpha);
        c->add_option("--beta", p.beta);
        c->add_option("--gamma", p.gamma);
    };

    CLI::App* unitcell = app.add_subcommand("unitcell", "periodic TFW unit-cell solves");
    CLI::App* uc_solve = unitcell->add_subcommand("solve", "solve and report cell moments");
    CLI::App* uc_stiff = unitcell->add_subcommand("stiffness", "finite-difference stiffness");
    for (CLI::App* c : {uc_solve, uc_stiff}) {
        c->add_option("--a0", p.a0);
        c->add_option("--Z", p.Z);
        c->add_option("--sigma", p.sigma);
        c->add_option("--lambda", p.lambda);
        c->add_option("--N", p.N);
        c->add_option("--lattice", p.lattice)->check(CLI::IsMember({"sc", "fcc"}));
        c->add_option("--mode", p.mode)->check(CLI::IsMember({"nucleus", "jellium"}));
    }
    uc_stiff->add_option("--fd-step", p.h);

    CLI::App* greens = app.add_subcommand("greens", "Green's functions of the corrector model");
    add_model_flags(greens);
    greens->add_option("--r-list", p.r_list);

    CLI::App* defect = app.add_subcommand("defect", "finite-ball spherical defect");
    CLI::App* d_sweep = defect->add_subcommand("sweep", "cell-size convergence sweep");
    CLI::App* d_energy = defect->add_subcommand("energy", "single-cell defect energy");
    for (CLI::App* c : {d_sweep, d_energy}) {
        add_model_flags(c);
        c->add_option("--rho", p.rho);
        c->add_option("--r0", p.r0);
    }
    d_sweep->add_option("--a0", p.a0);
    d_sweep->add_option("--r-min", p.r_min);
    d_sweep->add_option("--r-max", p.r_max);
    d_sweep->add_option("--points", p.points);
    d_energy->add_option("--R0", p.R0);

    CLI::App* elastic = app.add_subcommand("elastic", "isotropic Eshelby defect energy");
    elastic->add_option("--mu", p.mu);
    elastic->add_option("--kappa", p.kappa);
    elastic->add_option("--sigma0", p.sigma0);
    elastic->add_option("--rho", p.rho);
    elastic->add_option("--r0", p.r0);
    elastic->add_option("--R0", p.R0);

    CLI::App* kernel = app.add_subcommand("kernel", "nonlocal kernel tools");
    CLI::App* k_fit = kernel->add_subcommand("fit", "partial-fraction kernel fit");
    k_fit->add_option("--samples", p.samples_path);
    k_fit->add_option("--m", p.m);

    CLI::App* figure =
        app.add_subcommand("paper-figure", "reference moments -> model -> sweep -> chart");
    add_model_flags(figure);
    figure->add_option("--a0", p.a0);
    figure->add_option("--rho", p.rho);
    figure->add_option("--points", p.points);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::string sub = cfg_subcommand;
    if (uc_solve->parsed()) sub = "unitcell solve";
    if (uc_stiff->parsed()) sub = "unitcell stiffness";
    if (greens->parsed()) sub = "greens";
    if (d_sweep->parsed()) sub = "defect sweep";
    if (d_energy->parsed()) sub = "defect energy";
    if (elastic->parsed()) sub = "elastic";
    if (k_fit->parsed()) sub = "kernel fit";
    if (figure->parsed()) sub = "paper-figure";
    if (sub.empty()) {
        std::cerr << "error: no subcommand given\n" << app.help();
        return 2;
    }

    std::error_code ec;
    std::filesystem::create_directories(p.out_dir, ec);

    Outputs out{p.out_dir, {}};
    json manifest;
    manifest["tool"] = "qcfield";
    manifest["parameters"] = params_json(p, sub);

    int code = 0;
    try {
        if (sub == "unitcell solve") run_unitcell_solve(p, out);
        else if (sub == "unitcell stiffness") run_unitcell_stiffness(p, out);
        else if (sub == "greens") run_greens(p, out);
        else if (sub == "defect sweep") run_defect_sweep(p, out, "defect_sweep");
        else if (sub == "defect energy") run_defect_energy(p, out);
        else if (sub == "elastic") run_elastic(p, out);
        else if (sub == "kernel fit") run_kernel_fit(p, out);
        else if (sub == "paper-figure") {
            Params fp = p;
            fp.r0 = fp.a0 / 2.0;
            fp.r_min = 1.2 * fp.r0;
            fp.r_max = 10.0 * fp.a0;
            manifest["parameters"] = params_json(fp, sub);
            run_defect_sweep(fp, out, "cell_size_error");
        } else {
            std::cerr << "error: unknown subcommand: " << sub << "\n";
            return 2;
        }
        manifest["status"] = "ok";
    } catch (const qcf::Error& e) {
        manifest["status"] = "error";
        manifest["error"] = {{"category", e.exit_code()}, {"message", e.what()}};
        std::cerr << "error: " << e.what() << "\n";
        code = e.exit_code();
    } catch (const std::exception& e) {
        manifest["status"] = "error";
        manifest["error"] = {{"category", 5}, {"message", e.what()}};
        std::cerr << "error: " << e.what() << "\n";
        code = 5;
    }

    manifest["outputs"] = json::array();
    for (const auto& [name, hash] : out.files)
        manifest["outputs"].push_back({{"file", name}, {"fnv64", hash}});
    try {
        qcf::write_file((std::filesystem::path(p.out_dir) / "manifest.json").string(),
                        manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (code == 0) code = 2;
    }
    return code;
}
