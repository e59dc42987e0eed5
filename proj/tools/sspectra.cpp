// Command-line front end: spectra, resolvents, scans, and theorem
// verification batches with machine-readable reports.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "sspec/fredholm.hpp"
#include "sspec/random_gen.hpp"
#include "sspec/shiftlab.hpp"
#include "sspec/sresolvent.hpp"

using namespace sspec;
using nlohmann::json;

namespace {

struct MalformedInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedInput("cannot open input file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw MalformedInput("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

QMatrix load_matrix(const std::string& path) {
    try {
        return load_json(path).get<QMatrix>();
    } catch (const MalformedInput&) {
        throw;
    } catch (const std::exception& e) {
        throw MalformedInput("invalid matrix in " + path + ": " + e.what());
    }
}

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf,%lf", &g.u0, &g.u1, &g.r1, &g.step) != 4)
        throw MalformedInput("grid must be u0,u1,r1,step");
    try {
        g.validate();
    } catch (const std::exception& e) {
        throw MalformedInput(e.what());
    }
    return g;
}

Quaternion parse_quaternion(const std::string& s) {
    Quaternion q;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf,%lf", &q.w, &q.x, &q.y, &q.z) == 4) return q;
    double w;
    if (std::sscanf(s.c_str(), "%lf", &w) == 1) return Quaternion(w);
    throw MalformedInput("quaternion must be w,x,y,z or a single real");
}

std::pair<int, int> parse_range(const std::string& s) {
    int a, b;
    if (std::sscanf(s.c_str(), "%d..%d", &a, &b) == 2) return {a, b};
    if (std::sscanf(s.c_str(), "%d", &a) == 1) return {1, a};
    throw MalformedInput("range must be a..b or a single upper bound");
}

ShiftOp parse_op(const std::string& s, int power) {
    ShiftOp op;
    if (s == "R") op = ShiftOp::right_shift_R();
    else if (s == "T") op = ShiftOp::rank_one_T();
    else if (s == "V") op = ShiftOp::bilateral_shift();
    else if (s == "Su") op = ShiftOp::unilateral_shift();
    else {
        try {
            op = shift_op_from_json(load_json(s));
        } catch (const MalformedInput&) {
            throw;
        } catch (const std::exception& e) {
            throw MalformedInput("invalid operator in " + s + ": " + e.what());
        }
    }
    if (power < 1) throw MalformedInput("power must be >= 1");
    ShiftOp acc = op;
    for (int k = 1; k < power; ++k) acc = acc * op;
    return acc;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << text << "\n";
}

void emit_report(const std::string& out_path, json config, json body) {
    body["config"] = std::move(config);
    emit(out_path, body.dump(2));
}

std::unique_ptr<Homomorphism> make_hom(const QMatrix& A, int block) {
    if (block <= 0) return std::make_unique<IdentityHom>(A.n());
    if (block >= A.n()) throw MalformedInput("--block must split the matrix: 0 < n1 < n");
    return std::make_unique<BlockTriangularHom>(block, A.n() - block);
}

// -------------------------------------------------------------------------
// verify suites: each instance reports pass/fail; the batch succeeds iff all
// instances pass. Precondition violations are recorded, not fatal.

struct VerifyBatch {
    json instances = json::array();
    bool all_pass = true;

    void add(const json& inst, bool pass) {
        json row = inst;
        row["pass"] = pass;
        instances.push_back(row);
        all_pass = all_pass && pass;
    }
};

int finish_verify(const std::string& out_path, const json& config, VerifyBatch& batch) {
    emit_report(out_path, config,
                {{"instances", batch.instances}, {"all_pass", batch.all_pass}});
    return batch.all_pass ? 0 : 3;
}

int verify_identity_e1(const std::string& out, int trials, unsigned seed, double tol) {
    std::mt19937_64 rng(seed);
    VerifyBatch batch;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        int n = 2 + static_cast<int>(rng() % 2);
        QMatrix a = random_qmatrix(rng, n), b = random_qmatrix(rng, n);
        Quaternion q = random_quaternion(rng, 2.0);
        if (q.norm() < 0.1) q = q + Quaternion(0.5);
        double scale = std::pow(std::max({1.0, op_norm(a), op_norm(b), q.norm()}), 4);
        double res = sum_identity_residual(q, a, b) / scale;
        worst = std::max(worst, res);
        if (res >= tol || t + 1 == trials)
            batch.add({{"trial", t}, {"residual", res}}, res < tol);
    }
    json cfg{{"command", "verify identity-e1"}, {"trials", trials}, {"seed", seed},
             {"tol", tol}};
    batch.instances.push_back({{"worst_residual", worst}});
    return finish_verify(out, cfg, batch);
}

int verify_sum(const std::string& out, int trials, unsigned seed, bool weyl) {
    std::mt19937_64 rng(seed);
    VerifyBatch batch;
    for (int t = 0; t < trials; ++t) {
        int n1 = 1 + static_cast<int>(rng() % 2), n2 = 1 + static_cast<int>(rng() % 2);
        BlockTriangularHom h(n1, n2);
        QMatrix a = h.assemble(random_qmatrix(rng, n1), random_qmatrix_norm_capped(rng, std::max(n1, n2), 1.0),
                               random_qmatrix(rng, n2));
        QMatrix b = h.assemble(random_qmatrix(rng, n1), random_qmatrix_norm_capped(rng, std::max(n1, n2), 1.0),
                               random_qmatrix(rng, n2));
        // The union law needs ab, ba in ker(A): make one factor strictly upper.
        QMatrix zero1 = QMatrix::zero(n1), zero2 = QMatrix::zero(n2);
        b = h.assemble(zero1, random_qmatrix(rng, std::max(n1, n2)), zero2);
        try {
            SetComparison cmp = theorem_sum_spectra(h, a, b, weyl);
            batch.add({{"trial", t}, {"hausdorff", cmp.hausdorff}}, cmp.equal);
        } catch (const std::invalid_argument& e) {
            batch.add({{"trial", t}, {"precondition", e.what()}}, false);
        }
    }
    json cfg{{"command", weyl ? "verify sum --weyl" : "verify sum"},
             {"algebra", "block"}, {"trials", trials}, {"seed", seed}};
    return finish_verify(out, cfg, batch);
}

int verify_inverse(const std::string& out, int trials, unsigned seed) {
    std::mt19937_64 rng(seed);
    VerifyBatch batch;
    int done = 0;
    while (done < trials) {
        int n = 2 + static_cast<int>(rng() % 2);
        QMatrix a = random_qmatrix(rng, n);
        if (!is_invertible(a, default_invertibility_tol(a)).invertible) continue;
        IdentityHom h(n);
        SetComparison cmp = inverse_spectral_map(h, a);
        batch.add({{"trial", done}, {"hausdorff", cmp.hausdorff}}, cmp.equal);
        ++done;
    }
    json cfg{{"command", "verify inverse"}, {"trials", trials}, {"seed", seed}};
    return finish_verify(out, cfg, batch);
}

int verify_product(const std::string& out, int trials, unsigned seed) {
    std::mt19937_64 rng(seed);
    VerifyBatch batch;
    for (int t = 0; t < trials; ++t) {
        int n = 2 + static_cast<int>(rng() % 2);
        QMatrix v1 = random_qmatrix(rng, n), v2 = random_qmatrix(rng, n);
        if (t % 5 == 0) {
            // singular factor: zero out the first row
            for (int j = 0; j < n; ++j) v1(0, j) = Quaternion(0.0);
        }
        IdentityHom h(n);
        SetComparison cmp = product_spectra_off_imaginaries(h, v1, v2, 1e-6);
        batch.add({{"trial", t}, {"hausdorff", cmp.hausdorff}}, cmp.equal);
    }
    json cfg{{"command", "verify product"}, {"trials", trials}, {"seed", seed}};
    return finish_verify(out, cfg, batch);
}

int verify_shift_boundary(const std::string& out, const Quaternion& q, int nmax) {
    VerifyBatch batch;
    for (int n = 1; n <= nmax; ++n) {
        BoundaryWitness w = boundary_witness_R(q, n);
        bool pass = w.distance <= w.bound + 1e-12 && w.inverse_error < 1e-9;
        batch.add({{"n", n}, {"distance", w.distance}, {"bound", w.bound},
                   {"inverse_error", w.inverse_error}},
                  pass);
    }
    json cfg{{"command", "verify shift-boundary"}, {"q", q}, {"n", nmax}};
    return finish_verify(out, cfg, batch);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"S-spectrum toolkit for quaternionic matrices and shift operators"};
    app.require_subcommand(1);

    std::string in_path, out_path, grid_str = "-2,2,2,0.05", q_str = "2,0,0,0";
    std::string op_str = "R", suite, range_str = "10", algebra = "block", fmt = "json";
    int nmax = 60, block = 0, power = 1, trials = 0, window = 12;
    unsigned seed = 1;
    double tol = 1e-9, dedup_tol = 1e-9, eps = 1e-6;

    auto* c_spec = app.add_subcommand("spectrum", "exact S-spectrum of a matrix");
    c_spec->add_option("--in", in_path)->required();
    c_spec->add_option("--out", out_path);
    c_spec->add_option("--dedup-tol", dedup_tol)->check(CLI::PositiveNumber);

    auto* c_scan = app.add_subcommand("scan", "sigma_min scan over the half-plane");
    c_scan->add_option("--in", in_path)->required();
    c_scan->add_option("--grid", grid_str);
    c_scan->add_option("--out", out_path);

    auto* c_res = app.add_subcommand("resolvent", "left S-resolvent series residuals");
    c_res->add_option("--in", in_path)->required();
    c_res->add_option("--q", q_str);
    c_res->add_option("--nmax", nmax)->check(CLI::PositiveNumber);
    c_res->add_option("--out", out_path);

    auto* c_fred = app.add_subcommand("fredholm-spectrum", "Fredholm S-spectrum");
    c_fred->add_option("--in", in_path)->required();
    c_fred->add_option("--block", block);
    c_fred->add_option("--out", out_path);

    auto* c_weyl = app.add_subcommand("weyl-spectrum", "Weyl S-spectrum");
    c_weyl->add_option("--in", in_path)->required();
    c_weyl->add_option("--block", block);
    c_weyl->add_option("--out", out_path);

    auto* c_bdry = app.add_subcommand("boundary-spectrum", "boundary S-spectrum");
    c_bdry->add_option("--in", in_path)->required();
    c_bdry->add_option("--eps", eps)->check(CLI::PositiveNumber);
    c_bdry->add_option("--out", out_path);

    auto* c_verify = app.add_subcommand("verify", "randomized theorem verification");
    c_verify->add_option("suite", suite,
                         "identity-e1 | sum | inverse | product | shift-boundary")
        ->required();
    c_verify->add_option("--trials", trials);
    c_verify->add_option("--seed", seed);
    c_verify->add_option("--tol", tol)->check(CLI::PositiveNumber);
    c_verify->add_option("--algebra", algebra);
    c_verify->add_option("--q", q_str);
    c_verify->add_option("--n", range_str);
    c_verify->add_option("--out", out_path);
    bool weyl_flag = false;
    c_verify->add_flag("--weyl", weyl_flag);

    auto* c_shift = app.add_subcommand("shift", "shift-operator experiments");
    c_shift->require_subcommand(1);
    auto* s_spec = c_shift->add_subcommand("spectrum", "Fredholm/Weyl grid classification");
    s_spec->add_option("--op", op_str);
    s_spec->add_option("--grid", grid_str);
    s_spec->add_option("--out", out_path);
    s_spec->add_option("--format", fmt);
    auto* s_index = c_shift->add_subcommand("index", "exact kernel/cokernel dimensions");
    s_index->add_option("--op", op_str);
    s_index->add_option("--power", power);
    s_index->add_option("--out", out_path);
    auto* s_bdry = c_shift->add_subcommand("boundary", "boundary witness for the right shift");
    s_bdry->add_option("--q", q_str);
    s_bdry->add_option("--n", range_str);
    s_bdry->add_option("--out", out_path);
    auto* s_norm = c_shift->add_subcommand("norm", "windowed operator-norm estimate");
    s_norm->add_option("--op", op_str);
    s_norm->add_option("--power", power);
    s_norm->add_option("--window", window);
    s_norm->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*c_spec) {
            QMatrix A = load_matrix(in_path);
            SpectrumReport rep{SpectrumKind::S, s_spectrum_exact(A, dedup_tol)};
            json body = rep;
            emit_report(out_path, {{"command", "spectrum"}, {"in", in_path},
                                   {"dedup_tol", dedup_tol}},
                        body);
        } else if (*c_scan) {
            QMatrix A = load_matrix(in_path);
            GridSpec grid = parse_grid(grid_str);
            ScanResult scan = s_spectrum_scan(A, grid);
            std::string csv = "u,r,sigma_min\n";
            char buf[96];
            for (int iu = 0; iu < grid.nu(); ++iu)
                for (int ir = 0; ir < grid.nr(); ++ir) {
                    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g", grid.u(iu),
                                  grid.r(ir), scan.at(iu, ir));
                    csv += buf;
                    csv += "\n";
                }
            csv.pop_back();
            emit(out_path, csv);
        } else if (*c_res) {
            QMatrix A = load_matrix(in_path);
            Quaternion q = parse_quaternion(q_str);
            QMatrix exact = s_resolvent_left(A, q);
            std::vector<double> res_series, res_coeff;
            for (int N = 0; N <= nmax; ++N) {
                res_series.push_back(op_norm(cauchy_partial_sum(A, q, N) - exact));
                res_coeff.push_back(coefficient_inverse(A, q, N));
            }
            emit_report(out_path,
                        {{"command", "resolvent"}, {"in", in_path}, {"nmax", nmax}},
                        {{"q", q}, {"residual_series", res_series},
                         {"residual_coeff", res_coeff}});
        } else if (*c_fred || *c_weyl) {
            QMatrix A = load_matrix(in_path);
            auto h = make_hom(A, block);
            try {
                h->validate_element(A, default_invertibility_tol(A));
            } catch (const std::exception& e) {
                throw MalformedInput(e.what());
            }
            SpectrumReport rep =
                *c_fred ? fredholm_s_spectrum(*h, A) : weyl_s_spectrum(*h, A);
            json body = rep;
            emit_report(out_path,
                        {{"command", *c_fred ? "fredholm-spectrum" : "weyl-spectrum"},
                         {"in", in_path}, {"homomorphism", h->name()}},
                        body);
        } else if (*c_bdry) {
            QMatrix A = load_matrix(in_path);
            SpectrumReport rep = boundary_s_spectrum(A, eps);
            json body = rep;
            emit_report(out_path,
                        {{"command", "boundary-spectrum"}, {"in", in_path}, {"eps", eps}},
                        body);
        } else if (*c_verify) {
            if (suite == "identity-e1")
                return verify_identity_e1(out_path, trials > 0 ? trials : 1000, seed, tol);
            if (suite == "sum") {
                if (algebra != "block") throw MalformedInput("--algebra must be 'block'");
                return verify_sum(out_path, trials > 0 ? trials : 50, seed, weyl_flag);
            }
            if (suite == "inverse")
                return verify_inverse(out_path, trials > 0 ? trials : 50, seed);
            if (suite == "product")
                return verify_product(out_path, trials > 0 ? trials : 50, seed);
            if (suite == "shift-boundary")
                return verify_shift_boundary(out_path, parse_quaternion(q_str),
                                             parse_range(range_str).second);
            throw MalformedInput("unknown verify suite: " + suite);
        } else if (*s_spec) {
            ShiftOp op = parse_op(op_str, 1);
            GridSpec grid = parse_grid(grid_str);
            auto points = weyl_s_spectrum_shift(op, grid);
            if (fmt == "csv") {
                std::string csv = "u,r,fredholm,weyl,index\n";
                char buf[128];
                for (const auto& p : points) {
                    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%d,%d,%d", p.u, p.r,
                                  p.in_fredholm ? 1 : 0, p.in_weyl ? 1 : 0, p.index);
                    csv += buf;
                    csv += "\n";
                }
                csv.pop_back();
                emit(out_path, csv);
            } else {
                json rows = json::array();
                for (const auto& p : points)
                    rows.push_back({{"u", p.u}, {"r", p.r}, {"fredholm", p.in_fredholm},
                                    {"weyl", p.in_weyl}, {"index", p.index}});
                emit_report(out_path,
                            {{"command", "shift spectrum"}, {"op", op_str},
                             {"grid", grid_str}},
                            {{"points", rows}});
            }
        } else if (*s_index) {
            ShiftOp op = parse_op(op_str, power);
            IndexResult r = index_of(op);
            emit_report(out_path,
                        {{"command", "shift index"}, {"op", op_str}, {"power", power}},
                        {{"dim_ker", r.dim_ker}, {"dim_coker", r.dim_coker},
                         {"index", r.index}, {"stable", r.stable}});
        } else if (*s_bdry) {
            Quaternion q = parse_quaternion(q_str);
            auto [n0, n1] = parse_range(range_str);
            json rows = json::array();
            for (int n = n0; n <= n1; ++n) {
                BoundaryWitness w = boundary_witness_R(q, n);
                rows.push_back({{"n", n}, {"distance", w.distance}, {"bound", w.bound},
                                {"inverse_error", w.inverse_error}});
            }
            emit_report(out_path,
                        {{"command", "shift boundary"}, {"q", q}, {"n", range_str}},
                        {{"witnesses", rows}});
        } else if (*s_norm) {
            ShiftOp op = parse_op(op_str, power);
            NormEstimate e = op_norm_estimate(op, window);
            emit_report(out_path,
                        {{"command", "shift norm"}, {"op", op_str}, {"window", window}},
                        {{"value", e.value}, {"window_used", e.window},
                         {"converged", e.converged}});
        }
    } catch (const MalformedInput& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
