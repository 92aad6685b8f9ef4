#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "eclab/euclid.hpp"
#include "eclab/gs_spaces.hpp"
#include "eclab/harness.hpp"
#include "eclab/laplace.hpp"
#include "eclab/models.hpp"
#include "eclab/wick.hpp"

namespace eclab::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = v[i];
  return out;
}

// "1, 0; 1, 0.5" -> two vectors.
std::vector<Vec> parse_vectors(const std::string& key, const std::string& text) {
  std::vector<Vec> out;
  std::istringstream is(text);
  std::string part;
  while (std::getline(is, part, ';')) {
    Config c;
    c.set(key, part);
    auto v = c.nums(key);
    if (v.empty()) continue;
    out.push_back(to_vec(v));
  }
  if (out.empty()) throw UsageError("config key " + key + ": no vectors");
  return out;
}

quad::Options quad_options(const Config& c) {
  quad::Options o;
  o.tol = c.num("params.quad_tol");
  o.abs_tol = c.num("params.quad_abs_tol");
  return o;
}

PairingForm parse_form(const std::string& name, int k) {
  if (name == "lorentz") return PairingForm::lorentz(k);
  if (name == "euclidean") return PairingForm::euclidean(k);
  throw UsageError("unknown pairing form " + name + " (lorentz, euclidean)");
}

SpatialSign parse_sign(const std::string& s) {
  if (s == "consistent") return SpatialSign::PairingConsistent;
  if (s == "written") return SpatialSign::AsWritten;
  throw UsageError("unknown spatial sign " + s + " (consistent, written)");
}

// Values of the keys in one section, in key order.
std::vector<std::pair<std::string, std::string>> section(const Config& c, const std::string& name) {
  std::vector<std::pair<std::string, std::string>> out;
  const std::string prefix = name + ".";
  for (const auto& [k, v] : c.entries())
    if (k.rfind(prefix, 0) == 0) out.emplace_back(k.substr(prefix.size()), v);
  return out;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

Mat random_rotation(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> N01;
  Mat A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = N01(rng);
  Eigen::HouseholderQR<Mat> qr(A);
  Mat Q = qr.householderQ();
  if (Q.determinant() < 0) Q.col(0) *= -1.0;
  return Q;
}

// --------------------------------------------------------- example1-divergence

const char* kExample1 = R"([run]
seed = 0
threads = 1

[params]
radii = 1, 2, 3, 5, 8
quad_tol = 1e-10
function = tf{dim=2, P="1", Q="-w1^2 - w2^3"}
half_cone = cone{dim=1, kind=full} x cone{dim=1, kind=orthant}
alpha = 0.6666666666666666
beta = 0.5
A = 2
B = 2
norm_R = 20
norm_points = 41
norm_Rq = 4
norm_q_points = 9

[tolerances]
ratio_min = 1.5
)";

void run_example1(const Config& c, Result& r) {
  auto radii = c.nums("params.radii");
  if (radii.size() < 2) throw UsageError("params.radii needs at least two radii");
  const double tol = c.num("params.quad_tol");
  auto& t = r.table("", {"R", "integral", "ratio_to_previous"});
  std::vector<double> I;
  double min_step = kInf;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    I.push_back(example1_divergence(radii[i], tol));
    double ratio = i ? I[i] / I[i - 1] : std::nan("");
    if (i) min_step = std::min(min_step, I[i] - I[i - 1]);
    t.add({radii[i], I[i], ratio});
  }
  r.check_gt("integral strictly increases in R", min_step, 0.0);
  r.check_gt("last/penultimate ratio", I.back() / I[I.size() - 2], c.num("tolerances.ratio_min"));

  auto f = TestFunction::parse(c.str("params.function"));
  GSParams p{c.num("params.alpha"), c.num("params.beta"), c.num("params.A"), c.num("params.B")};
  Truncation tr;
  tr.R = c.num("params.norm_R");
  tr.points = static_cast<int>(c.integer("params.norm_points"));
  tr.Rq = c.num("params.norm_Rq");
  tr.q_points = static_cast<int>(c.integer("params.norm_q_points"));
  auto half = cone_norm(f, parse_cone(c.str("params.half_cone")), p, tr);
  auto full = cone_norm(f, Cone::full(2), p, tr);
  auto& tn = r.table("cone-norm", {"cone", "level", "M", "R", "log_value"});
  for (auto [name, rep] : {std::pair<const char*, const NormReport*>{"half", &half}, {"full", &full}})
    for (std::size_t i = 0; i < rep->levels.size(); ++i)
      tn.add({name, static_cast<int>(i), rep->levels[i].M, rep->levels[i].R, rep->levels[i].log_value});
  r.check("cone_norm on R x R+ has a stable trend", !half.diverges && std::isfinite(half.log_value), half.log_value,
          kInf);
  r.check_true("cone_norm on R^2 reports divergence", full.diverges);
  r.details["cone_norm_half"] = nlohmann::json::parse(half.to_json());
  r.details["cone_norm_full"] = nlohmann::json::parse(full.to_json());
}

// --------------------------------------------------------------- decompose-demo

const char* kDecompose = R"([run]
seed = 0
threads = 1

[params]
function = tf{dim=1, P="1", Q="-w1^2"}
U = cone{dim=1, kind=origin}
U1 = cone{dim=1, gens=[[1]]}
U2 = cone{dim=1, gens=[[-1]]}
alpha = 0.5
beta = 0.5
A = 1
B = 2
cert_R = 6
cert_points = 25
cert_Rq = 3
cert_q_points = 13
grid_lo = -10
grid_hi = 10
grid_points = 1000

[tolerances]
sup_error = 1e-9
)";

void run_decompose(const Config& c, Result& r) {
  auto f = TestFunction::parse(c.str("params.function"));
  GSParams p{c.num("params.alpha"), c.num("params.beta"), c.num("params.A"), c.num("params.B")};
  Truncation tr;
  tr.R = c.num("params.cert_R");
  tr.points = static_cast<int>(c.integer("params.cert_points"));
  tr.Rq = c.num("params.cert_Rq");
  tr.q_points = static_cast<int>(c.integer("params.cert_q_points"));
  auto d = decompose(f, parse_cone(c.str("params.U")), std::nullopt, parse_cone(c.str("params.U1")),
                     parse_cone(c.str("params.U2")), p, tr);

  const int k = f.dim();
  const double lo = c.num("params.grid_lo"), hi = c.num("params.grid_hi");
  const long m = c.integer("params.grid_points");
  if (m < 2) throw UsageError("params.grid_points must be at least 2");
  std::vector<std::string> header;
  for (int j = 0; j < k; ++j) header.push_back("x" + std::to_string(j + 1));
  for (const char* h : {"f", "f1", "f2", "g1", "error"}) header.emplace_back(h);
  auto& t = r.table("", header);
  std::size_t total = 1;
  for (int j = 0; j < k; ++j) total *= static_cast<std::size_t>(m);
  double worst = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    CVec w(k);
    std::size_t rest = idx;
    std::vector<Table::Cell> row;
    for (int j = k - 1; j >= 0; --j) {
      w(j) = lo + (hi - lo) * static_cast<double>(rest % m) / (m - 1);
      rest /= m;
    }
    for (int j = 0; j < k; ++j) row.emplace_back(w(j).real());
    const Complex fv = f(w), f1 = d.f1(w), f2 = d.f2(w);
    const double err = std::abs(f1 + f2 - fv);
    worst = std::max(worst, err);
    row.emplace_back(fv.real());
    row.emplace_back(f1.real());
    row.emplace_back(f2.real());
    row.emplace_back(d.g1(w).real());
    row.emplace_back(err);
    t.add(std::move(row));
  }
  r.check_lt("sup |f1 + f2 - f| on the grid", worst, c.num("tolerances.sup_error"));
  const auto& cert = d.certificate;
  r.check("f1 certificate trend is stable", !cert.f1_norm.diverges, cert.f1_norm.log_value, kInf);
  r.check("f2 certificate trend is stable", !cert.f2_norm.diverges, cert.f2_norm.log_value, kInf);
  r.details["theta"] = cert.theta;
  r.details["theta2"] = cert.theta2;
  r.details["A0"] = cert.A0;
  r.details["A_prime"] = cert.A_prime;
  r.details["A_prime2"] = cert.A_prime2;
  r.notes.push_back("theta = " + fmt(cert.theta) + ", A' = " + fmt(cert.A_prime));
}

// ------------------------------------------------------------- laplace-boundary

const char* kBoundary = R"([run]
seed = 0
threads = 1

[params]
density = tf{dim=2, P="1", Q="-w1^2 - w2^2"}
carrier = cone{dim=2, kind=forward_light}
function = tf{dim=2, P="1", Q="-w1^2 - w2^2"}
form = lorentz
directions = 1, 0; 1, 0.5
y = 1e-3
table_nodes = 64
quad_tol = 1e-9
quad_abs_tol = 1e-13
line_density = tf{dim=1, P="1", Q="-w1"}
line_function = tf{dim=1, P="1", Q="-w1^2"}
line_sequence = 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7

[tolerances]
identity_gap = 1e-6
limit_gap = 1e-6
)";

void run_boundary(const Config& c, Result& r) {
  auto& t = r.table("", {"case", "y1", "y2", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "gap_identity", "gap_limit"});
  const auto opt = quad_options(c);
  auto rho = TestFunction::parse(c.str("params.density"));
  auto f = TestFunction::parse(c.str("params.function"));
  auto u = Functional::density(rho, parse_cone(c.str("params.carrier")));
  const auto form = parse_form(c.str("params.form"), u.dim());
  const double y = c.num("params.y");
  std::vector<Vec> ys;
  for (Vec dir : parse_vectors("params.directions", c.str("params.directions"))) {
    if (dir.size() != u.dim()) throw UsageError("direction dimension differs from the density");
    ys.push_back(y * dir / dir.norm());
  }
  const int nodes = static_cast<int>(c.integer("params.table_nodes"));
  double worst = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    auto rep = boundary_value_check(u, f, {ys[i]}, form, c.num("tolerances.limit_gap"), opt, nodes);
    const auto& s = rep.steps[0];
    worst = std::max(worst, s.gap_identity);
    t.add({"direction " + std::to_string(i + 1), s.y(0), s.y.size() > 1 ? s.y(1) : 0.0, s.lhs.real(), s.lhs.imag(),
           s.identity_rhs.real(), s.identity_rhs.imag(), s.gap_identity, s.gap_limit});
    r.notes.push_back("direction " + std::to_string(i + 1) + ": identity gap " + fmt(s.gap_identity) +
                      ", distance to the Fourier limit " + fmt(s.gap_limit));
  }
  r.check_lt("identity gap at y along every direction", worst, c.num("tolerances.identity_gap"));

  // One-variable density: the y -> 0 limit itself.
  auto lu = Functional::density(TestFunction::parse(c.str("params.line_density")),
                                Cone::from_generators(1, {Vec::Constant(1, 1.0)}));
  auto lf = TestFunction::parse(c.str("params.line_function"));
  std::vector<Vec> seq;
  for (double v : c.nums("params.line_sequence")) seq.push_back(Vec::Constant(1, v));
  auto rep = boundary_value_check(lu, lf, seq, PairingForm::euclidean(1), c.num("tolerances.limit_gap"), opt);
  for (const auto& s : rep.steps)
    t.add({"line", s.y(0), 0.0, s.lhs.real(), s.lhs.imag(), s.identity_rhs.real(), s.identity_rhs.imag(),
           s.gap_identity, s.gap_limit});
  r.check_lt("line density: gap to the Fourier side at the end of the sequence", rep.final_gap_limit,
             c.num("tolerances.limit_gap"));
  r.check_true("line density: gap decreases over the tail of the sequence", rep.monotone_tail);
  r.details["line"] = nlohmann::json::parse(rep.to_json());
}

// -------------------------------------------------------------- check-transform

const char* kCheck = R"([run]
seed = 0
threads = 1

[params]
d = 2
n = 1
function = tf{dim=2, P="1 + w2", Q="-w1^2 - (w2 - 0.5)^2", flat="1:1.0"}
carrier = cone{dim=2, kind=forward_light}
probes = 1.2, 0.7; 1.5, -1.0; 2.0, 0.3
quad_tol = 1e-10
quad_abs_tol = 0
line_function = tf{dim=1, P="1", Q="-w1^2", flat="1:1.0"}
line_p = 1
# 30-digit quadrature of (2 pi)^-1 int_{-inf}^0 exp(1/x - x^2 + x) dx
line_reference = 0.0097074455932458431935

[tolerances]
laplace_gap = 1e-6
sign_separation = 1e-3
line_rel = 1e-8
)";

void run_check(const Config& c, Result& r) {
  const int d = static_cast<int>(c.integer("params.d")), n = static_cast<int>(c.integer("params.n"));
  auto f = TestFunction::parse(c.str("params.function"));
  const auto opt = quad_options(c);
  const auto form = PairingForm::reconstruction(d, n);
  const Cone carrier = parse_cone(c.str("params.carrier"));
  auto& t = r.table("", {"probe", "p", "laplace_re", "laplace_im", "consistent_re", "consistent_im", "written_re",
                         "written_im", "gap_consistent", "gap_written"});
  double worst = 0.0, sep = 0.0;
  const int k = d * n;
  std::vector<quad::Axis> axes(k, quad::Axis::line());
  for (int j = 0; j < n; ++j) axes[j * d] = quad::Axis::negative_half();
  int idx = 0;
  for (const Vec& p : parse_vectors("params.probes", c.str("params.probes"))) {
    if (p.size() != k) throw UsageError("probe dimension differs from d*n");
    auto u = Functional::point_mass(p, carrier);
    auto g = [&](const Vec& xi) { return laplace_transform(u, iota(xi, d), form, opt) * f(xi); };
    const Complex lhs = quad::integrate_nd(g, axes, opt).value / std::pow(2 * kPi, k);
    const Complex a = check_transform(f, d, n, p, SpatialSign::PairingConsistent, opt);
    const Complex b = check_transform(f, d, n, p, SpatialSign::AsWritten, opt);
    worst = std::max(worst, std::abs(lhs - a));
    sep = std::max(sep, std::abs(lhs - b));
    std::ostringstream ps;
    for (int j = 0; j < k; ++j) ps << (j ? " " : "") << p(j);
    t.add({++idx, ps.str(), lhs.real(), lhs.imag(), a.real(), a.imag(), b.real(), b.imag(), std::abs(lhs - a),
           std::abs(lhs - b)});
  }
  r.check_lt("check transform matches the Laplace side of delta_p", worst, c.num("tolerances.laplace_gap"));
  r.check_gt("opposite spatial sign is detected at some probe", sep, c.num("tolerances.sign_separation"));

  auto lf = TestFunction::parse(c.str("params.line_function"));
  const double ref = c.num("params.line_reference");
  const Complex v = check_transform(lf, 1, 1, Vec::Constant(1, c.num("params.line_p")), SpatialSign::PairingConsistent,
                                    opt);
  r.check_lt("one-variable transform against the reference value", std::abs(v - ref) / std::abs(ref),
             c.num("tolerances.line_rel"));
}

// ------------------------------------------------------------------ wick-oracle

const char* kWick = R"([run]
seed = 0
threads = 1

[params]
n = 4
kmax = 12
coefficients = inverse_factorial

[tolerances]
max_seconds = 60
)";

void run_wick(const Config& c, Result& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(c.integer("params.n")), kmax = static_cast<int>(c.integer("params.kmax"));
  auto d = CoefficientSequence::parse(c.str("params.coefficients"));
  std::vector<WickOracleRow> rows;
  auto rep = wick_oracle_check(n, kmax, &rows);
  auto& t = r.table("", {"n", "kappa", "K", "formula", "oracle", "D_K", "D_K_oracle", "match"});
  std::size_t dk_mismatch = 0, inexact = 0;
  for (const auto& row : rows) {
    auto dk = coefficient_D_K(row.K, d);
    Rational prod(row.oracle);
    bool exact = dk.exact.has_value();
    for (int kj : row.kappa) {
      auto e = d.exact(kj);
      if (!e) exact = false;
      else prod *= *e;
    }
    if (!exact) ++inexact;
    const bool match = exact && *dk.exact == prod && row.formula == row.oracle;
    if (!match) ++dk_mismatch;
    t.add({row.K.n(), join(row.kappa), row.K.str(), row.formula.str(), row.oracle.str(),
           exact ? dk.exact->str() : fmt(dk.value), exact ? prod.str() : "", match});
  }
  const double secs = since(t0);
  r.notes.push_back(std::to_string(rep.kappas) + " valence vectors, " + std::to_string(rep.indices) + " indices");
  for (const auto& m : rep.mismatch_log) r.notes.push_back("mismatch: " + m);
  r.check_le("diagram count mismatches", static_cast<double>(rep.mismatches), 0.0);
  r.check_le("D_K mismatches against oracle counts", static_cast<double>(dk_mismatch), 0.0);
  r.check_le("inexact D_K values", static_cast<double>(inexact), 0.0);
  r.check_lt("runtime in seconds", secs, c.num("tolerances.max_seconds"));
  r.details["kappas"] = rep.kappas;
  r.details["indices"] = rep.indices;
}

// -------------------------------------------------------- coefficient-condition

const char* kCoefficient = R"([run]
seed = 0
threads = 1

[params]
kmax = 64
ok_sequences = inverse_factorial, exponential:2
ok_A = 1, 1
ok_h = 2, 4
fail_sequences = gaussian
)";

void run_coefficient(const Config& c, Result& r) {
  const int kmax = static_cast<int>(c.integer("params.kmax"));
  auto oks = c.list("params.ok_sequences");
  auto As = c.nums("params.ok_A"), hs = c.nums("params.ok_h");
  if (As.size() != oks.size() || hs.size() != oks.size())
    throw UsageError("params.ok_A and params.ok_h need one entry per sequence");
  auto& t = r.table("", {"sequence", "expected", "ok", "A", "h", "holds_at_stated", "witness_k", "witness_l",
                         "witness_log_ratio"});
  for (std::size_t i = 0; i < oks.size(); ++i) {
    auto d = CoefficientSequence::parse(oks[i]);
    auto cc = check_coefficient_condition(d, kmax);
    const bool stated = coefficient_condition_holds(d, As[i], hs[i], kmax);
    t.add({oks[i], "ok", cc.ok, cc.A, cc.h, stated, -1, -1, 0.0});
    r.check_true(oks[i] + ": condition found by the search", cc.ok);
    r.check_true(oks[i] + ": holds at A = " + fmt(As[i]) + ", h = " + fmt(hs[i]), stated);
  }
  for (const auto& s : c.list("params.fail_sequences")) {
    auto cc = check_coefficient_condition(CoefficientSequence::parse(s), kmax);
    const int wk = cc.witness ? cc.witness->first : -1, wl = cc.witness ? cc.witness->second : -1;
    t.add({s, "fail", cc.ok, cc.A, cc.h, false, wk, wl, cc.witness_log_ratio});
    r.check_true(s + ": fails with a witness", !cc.ok && cc.witness.has_value());
    if (cc.witness) r.notes.push_back(s + ": witness (k, l) = (" + std::to_string(wk) + ", " + std::to_string(wl) + ")");
  }
}

// ------------------------------------------------------------ convergence-bound

const char* kConvergence = R"([run]
seed = 0
threads = 1

[params]
inequality_n = 2, 3, 4
inequality_Nmax = 8
sequence = inverse_factorial
divergent_sequence = constant:1
L = 3
epsilon = 0.1
alphas = 0.5, 1, 2
uv_beta = 2
uv_epsilon = 0.5
grid_log10_lo = -2
grid_log10_hi = 3
grid_points = 41
)";

void run_convergence(const Config& c, Result& r) {
  auto& ti = r.table("inequalities", {"n", "Nmax", "checked", "violations", "worst_multinomial", "worst_valence",
                                      "worst_central"});
  const int Nmax = static_cast<int>(c.integer("params.inequality_Nmax"));
  for (double nd : c.nums("params.inequality_n")) {
    const int n = static_cast<int>(nd);
    auto rep = combinatorial_inequalities(n, Nmax);
    ti.add({n, Nmax, rep.checked, rep.violations, rep.worst_multinomial, rep.worst_valence, rep.worst_central});
    r.check_le("inequalities n = " + std::to_string(n) + ": violations over " + std::to_string(rep.checked) +
                   " indices",
               static_cast<double>(rep.violations), 0.0);
  }

  auto d = CoefficientSequence::parse(c.str("params.sequence"));
  const double L = c.num("params.L"), eps = c.num("params.epsilon");
  std::vector<double> grid;
  const long m = c.integer("params.grid_points");
  const double lo = c.num("params.grid_log10_lo"), hi = c.num("params.grid_log10_hi");
  for (long i = 0; i < m; ++i) grid.push_back(std::pow(10.0, m == 1 ? lo : lo + (hi - lo) * i / (m - 1)));
  auto wIR = [](double x) { return std::log(2.0 + x); };
  auto wUV = [](double x) { return std::log1p(1.0 / x); };
  auto& t = r.table("", {"side", "exponent", "r", "lhs", "tail", "weight", "C_weight", "majorant"});
  for (double alpha : c.nums("params.alphas")) {
    auto rep = convergence_bound_check(d, wIR, Envelope::IR, alpha, L, eps, grid);
    r.check("IR bound fits for alpha = " + fmt(alpha), rep.ok && std::isfinite(rep.C), rep.C, kInf);
    double worst = -kInf;
    for (const auto& row : rep.rows) {
      // For 1/k!, k!/(2k)! <= 1/k! gives the closed-form majorant (2 + r)^L.
      const double maj = std::pow(2.0 + row.r, L);
      worst = std::max(worst, (row.lhs + row.tail) / maj);
      t.add({"IR", alpha, row.r, row.lhs, row.tail, row.weight, rep.C * row.weight, maj});
    }
    if (d.kind() == CoefficientSequence::Kind::InverseFactorial)
      r.check_le("IR sum stays below (2 + r)^L for alpha = " + fmt(alpha), worst, 1.0);
  }
  auto uv = convergence_bound_check(d, wUV, Envelope::UV, c.num("params.uv_beta"), L, c.num("params.uv_epsilon"),
                                    grid);
  for (const auto& row : uv.rows)
    t.add({"UV", c.num("params.uv_beta"), row.r, row.lhs, row.tail, row.weight, uv.C * row.weight, std::nan("")});
  r.check("UV bound fits", uv.ok && std::isfinite(uv.C), uv.C, kInf);

  auto bad = convergence_bound_check(CoefficientSequence::parse(c.str("params.divergent_sequence")), wIR, Envelope::IR,
                                     1.0, L, eps, grid);
  r.check_true("divergent sequence is rejected with a witness", !bad.ok && bad.divergence_at.has_value());
  if (bad.divergence_at) r.notes.push_back("divergence witnessed at r = " + fmt(*bad.divergence_at));
}

// --------------------------------------------------------------- lambda-constant

const char* kLambda = R"([run]
seed = 20240611
threads = 1

[params]
cone = cone{dim=2, kind=backward_light}
max_terms = 3
norm = sup
samples = 100000
starts = 12
expected = 1

[tolerances]
value = 1e-6
certificate = 1e-9
)";

void run_lambda(const Config& c, Result& r) {
  LambdaOptions o;
  const auto& nm = c.str("params.norm");
  if (nm == "sup") o.norm = Norm::Sup;
  else if (nm == "euclidean") o.norm = Norm::Euclidean;
  else throw UsageError("params.norm must be sup or euclidean");
  o.samples = static_cast<int>(c.integer("params.samples"));
  o.starts = static_cast<int>(c.integer("params.starts"));
  o.seed = r.seed;
  auto res = lambda_constant(parse_cone(c.str("params.cone")), static_cast<int>(c.integer("params.max_terms")), o);
  auto& t = r.table("", {"terms", "value"});
  for (std::size_t i = 0; i < res.per_terms.size(); ++i) t.add({static_cast<int>(i + 2), res.per_terms[i]});
  r.check_le("|lambda - expected|", std::abs(res.lambda - c.num("params.expected")), c.num("tolerances.value"));
  r.check_ge("sampled certificate minimum", res.certificate_min, res.lambda - c.num("tolerances.certificate"));
  r.notes.push_back("lambda = " + fmt(res.lambda) + " (" + nm + " norm), hull value " + fmt(res.hull_value) +
                    " with support " + std::to_string(res.hull_support));
  r.details["lambda"] = res.lambda;
  r.details["norm"] = nm;
  r.details["certificate_samples"] = res.certificate_samples;
  r.details["certificate_min"] = res.certificate_min;
}

// ---------------------------------------------------------- wightman-closed-form

const char* kWightman = R"([run]
seed = 2024
threads = 1

[params]
model = dipole2
g = 3/10
n = 2, 3
N = 20
points = 100
time_lo = 0.2
time_hi = 2
x_range = 2
subcone = 0.5

[tolerances]
rel = 1e-8
)";

void run_wightman(const Config& c, Result& r) {
  auto w = TwoPointModel::from_registry(c.str("params.model"));
  const Rational g = parse_rational(c.str("params.g"));
  const double gd = static_cast<double>(g);
  auto d = CoefficientSequence::exponential(g);
  const int N = static_cast<int>(c.integer("params.N"));
  const long points = c.integer("params.points");
  const int dim = w.dim();
  std::mt19937_64 rng(r.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0), T(c.num("params.time_lo"), c.num("params.time_hi"));
  const double xr = c.num("params.x_range"), rho = c.num("params.subcone");
  // Im ζ = -s (1, ρ v) with |v| <= 1, inside the backward cone.
  auto tube_point = [&] {
    CVec z(dim);
    const double s = T(rng);
    Vec v(dim - 1);
    for (int k = 0; k < dim - 1; ++k) v(k) = U(rng);
    if (v.norm() > 1) v /= v.norm();
    z(0) = Complex(xr * U(rng), -s);
    for (int k = 1; k < dim; ++k) z(k) = Complex(xr * U(rng), s * rho * v(k - 1));
    return z;
  };
  auto& t = r.table("", {"n", "point", "value_re", "value_im", "exact_re", "exact_im", "rel_err", "abs_err", "tail"});
  const double rel = c.num("tolerances.rel");
  for (double nd : c.nums("params.n")) {
    const int n = static_cast<int>(nd);
    WickSeries series(n, d, N);
    auto tc = tail_constants(n, d, w);
    std::vector<std::vector<CVec>> zetas(points);
    for (auto& z : zetas)
      for (int j = 0; j < n - 1; ++j) z.push_back(tube_point());
    std::vector<WightmanResult> res(points);
    std::vector<Complex> exact(points);
    parallel_for(points, r.threads, [&](std::size_t i) {
      res[i] = wightman_eval(series, zetas[i], w, tc);
      exact[i] = exponential_closed_form(zetas[i], w, gd);
    });
    double worst = 0.0, tail_ratio = 0.0;
    for (long i = 0; i < points; ++i) {
      const double err = std::abs(res[i].value - exact[i]);
      worst = std::max(worst, err / std::abs(exact[i]));
      tail_ratio = std::max(tail_ratio, err / res[i].tail);
      t.add({n, i, res[i].value.real(), res[i].value.imag(), exact[i].real(), exact[i].imag(), err / std::abs(exact[i]),
             err, res[i].tail});
    }
    r.check_le("n = " + std::to_string(n) + ": max relative error", worst, rel);
    r.check_le("n = " + std::to_string(n) + ": max remainder / tail bound", tail_ratio, 1.0);
  }
}

// -------------------------------------------------------------- schwinger-bounds

const char* kSchwinger = R"([run]
seed = 0
threads = 1

[params]
model = dipole2
coefficients = exponential:3/10
d = 2
n = 2
N = 20
alpha = 0.5
beta = 2
t_lo = -10
t_hi = -0.1
s = 10
t_points = 100
s_points = 100
epsilon = 0.5

[tolerances]
residual = 0
)";

void run_schwinger(const Config& c, Result& r) {
  auto w = TwoPointModel::from_registry(c.str("params.model"));
  EuclidConfig cfg;
  cfg.d = static_cast<int>(c.integer("params.d"));
  cfg.n = static_cast<int>(c.integer("params.n"));
  cfg.model = &w;
  cfg.coeffs = CoefficientSequence::parse(c.str("params.coefficients"));
  cfg.alpha = c.num("params.alpha");
  cfg.beta = c.num("params.beta");
  if (cfg.n != 2) throw UsageError("the difference grid covers n = 2 only");
  Schwinger s(cfg, static_cast<int>(c.integer("params.N")));
  auto grid = difference_grid(cfg.d, c.num("params.t_lo"), c.num("params.t_hi"), c.num("params.s"),
                              static_cast<int>(c.integer("params.t_points")),
                              static_cast<int>(c.integer("params.s_points")));
  const double eps = c.num("params.epsilon");
  auto fit = bound_fit_S(s, grid, eps);
  auto& t = r.table("", {"xi0", "xi1", "S_plus_tail", "bound", "margin"});
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    const double S = std::exp(fit.log_lhs[k]);
    const double b = std::exp(fit.log_C + fit.log_weight[k]);
    t.add({grid.points[k][0](0), grid.points[k][0](1), S, b, b - S});
  }
  r.check_true("fit stays within floating range", !fit.diverged);
  r.check_le("residual (log domain)", fit.residual, c.num("tolerances.residual"));
  auto fit2 = bound_fit_S(s, grid, 2 * eps);
  r.check_le("C at doubled epsilon", fit2.C, fit.C);
  r.notes.push_back("epsilon = " + fmt(eps) + ": C = " + fmt(fit.C) + "; epsilon = " + fmt(2 * eps) +
                    ": C = " + fmt(fit2.C));
  r.details["fit"] = {{"epsilon", fit.epsilon}, {"C", fit.C}, {"residual", fit.residual}, {"grid", fit.grid}};
  r.details["fit_doubled"] = {{"epsilon", fit2.epsilon}, {"C", fit2.C}, {"residual", fit2.residual}};
}

// ---------------------------------------------------------- chronological-order

const char* kChrono = R"([run]
seed = 2024
threads = 1

[params]
count = 1000
structured = false

[tolerances]
invariance = 1e-9
)";

void run_chrono(const Config& c, Result& r) {
  std::vector<int> dims;
  auto corpus = chronological_corpus(r.seed, static_cast<std::size_t>(c.integer("params.count")),
                                     c.flag("params.structured"), &dims);
  // Rigid motions drawn up front so the stream does not depend on threads.
  std::mt19937_64 rng(r.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> U(-5, 5);
  std::vector<std::vector<Vec>> moved(corpus.size());
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const int d = dims[k];
    Mat T = random_rotation(rng, d);
    Vec a(d);
    for (int j = 0; j < d; ++j) a(j) = U(rng);
    for (const auto& p : corpus[k]) moved[k].push_back(T * p + a);
  }
  std::vector<ChronoResult> r0(corpus.size()), r1(corpus.size());
  parallel_for(corpus.size(), r.threads, [&](std::size_t k) {
    r0[k] = chronological_order(corpus[k], dims[k]);
    r1[k] = chronological_order(moved[k], dims[k]);
  });
  auto& t = r.table("", {"index", "n", "d", "ratio", "floor", "ratio_moved", "difference"});
  double margin = kInf, diff = 0.0;
  std::map<int, double> lowest;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const int n = static_cast<int>(corpus[k].size());
    margin = std::min(margin, r0[k].ratio - r0[k].floor);
    diff = std::max(diff, std::abs(r0[k].ratio - r1[k].ratio));
    auto it = lowest.find(n);
    if (it == lowest.end() || r0[k].ratio < it->second) lowest[n] = r0[k].ratio;
    t.add({k, n, dims[k], r0[k].ratio, r0[k].floor, r1[k].ratio, std::abs(r0[k].ratio - r1[k].ratio)});
  }
  for (const auto& [n, v] : lowest) {
    r.notes.push_back("n = " + std::to_string(n) + ": lowest ratio " + fmt(v) + ", floor " + fmt(chronological_floor(n)));
    r.details["lowest_ratio"][std::to_string(n)] = v;
  }
  r.check_ge("min ratio - c_n over the corpus", margin, 0.0);
  r.check_le("max ratio change under rigid motions", diff, c.num("tolerances.invariance"));
}

// -------------------------------------------------------------- reconstruction

const char* kReconstruction = R"([run]
seed = 0
threads = 1

[params]
d = 2
n = 1
carrier = cone{dim=2, kind=forward_light}
point = 1.5, 0.4
density = tf{dim=2, P="1", Q="-w1^2 - w2^2"}
quad_tol = 1e-9
quad_abs_tol = 1e-13

[functions]
f1 = tf{dim=2, P="1", Q="-(w1 + 1)^2 - w2^2", flat="1:1.0"}
f2 = tf{dim=2, P="1 + w2", Q="-w1^2 - (w2 - 0.5)^2", flat="1:1.0"}
f3 = tf{dim=2, P="w1^2 - w2", Q="-0.5*(w1 + 2)^2 - 2*w2^2 + w2", flat="1:0.5"}

[tolerances]
gap = 1e-6
max_seconds = 300
)";

void run_reconstruction(const Config& c, Result& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const int d = static_cast<int>(c.integer("params.d")), n = static_cast<int>(c.integer("params.n"));
  const Cone carrier = parse_cone(c.str("params.carrier"));
  quad::Options opt{c.num("params.quad_tol"), 15, c.num("params.quad_abs_tol")};
  std::vector<std::pair<std::string, Functional>> us{
      {"delta", Functional::point_mass(to_vec(c.nums("params.point")), carrier)},
      {"density", Functional::density(TestFunction::parse(c.str("params.density")), carrier)}};
  auto fs = section(c, "functions");
  auto& t = r.table("", {"functional", "function", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "gap", "seconds"});
  const double tol = c.num("tolerances.gap");
  for (const auto& [uname, u] : us)
    for (const auto& [fname, ftext] : fs) {
      const auto t1 = std::chrono::steady_clock::now();
      auto res = reconstruction_check(u, TestFunction::parse(ftext), d, n, opt);
      t.add({uname, fname, res.lhs.real(), res.lhs.imag(), res.rhs.real(), res.rhs.imag(), res.gap, since(t1)});
      r.check_lt(uname + " / " + fname + ": gap", res.gap, tol);
    }
  r.check_lt("runtime in seconds", since(t0), c.num("tolerances.max_seconds"));
}

// ------------------------------------------------------------ boost-intertwine

const char* kBoost = R"([run]
seed = 0
threads = 1

[params]
d = 2
n = 1
l = 1
sign = consistent
t_lo = 0.5
t_hi = 2.5
s = 1
t_points = 5
s_points = 5
h = 1e-4

[functions]
f1 = tf{dim=2, P="1", Q="-(w1 + 1)^2 - w2^2", flat="1:1.0"}
f2 = tf{dim=2, P="1 + w2", Q="-w1^2 - (w2 - 0.5)^2", flat="1:1.0"}
f3 = tf{dim=2, P="w1^2 - w2", Q="-0.5*(w1 + 2)^2 - 2*w2^2 + w2", flat="1:0.5"}

[tolerances]
residual = 1e-4
)";

void run_boost(const Config& c, Result& r) {
  const int d = static_cast<int>(c.integer("params.d")), n = static_cast<int>(c.integer("params.n"));
  const int l = static_cast<int>(c.integer("params.l"));
  const auto sign = parse_sign(c.str("params.sign"));
  auto probes = probe_grid(d, c.num("params.t_lo"), c.num("params.t_hi"), c.num("params.s"),
                           static_cast<int>(c.integer("params.t_points")),
                           static_cast<int>(c.integer("params.s_points")));
  auto& t = r.table("", {"function", "p0", "p1", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_diff"});
  for (const auto& [fname, ftext] : section(c, "functions")) {
    auto rep = boost_intertwine_check(TestFunction::parse(ftext), d, n, l, probes, sign, c.num("params.h"));
    for (const auto& p : rep.probes)
      t.add({fname, p.p(0), p.p(1), p.lhs.real(), p.lhs.imag(), p.rhs.real(), p.rhs.imag(), std::abs(p.lhs - p.rhs)});
    r.check_lt(fname + ": relative residual", rep.residual, c.num("tolerances.residual"));
  }
}

// ------------------------------------------------------- hyperfunction-example

const char* kHyper = R"([run]
seed = 0
threads = 1

[params]
n_max = 20
decreasing_from = 5
epsilon = 0.25
A = 3
B = 2
lambda = 1
R = 10
points = 81
q_points = 9

[tolerances]
ray_rel = 1e-14
)";

void run_hyper(const Config& c, Result& r) {
  Truncation tr;
  tr.R = c.num("params.R");
  tr.points = static_cast<int>(c.integer("params.points"));
  tr.q_points = static_cast<int>(c.integer("params.q_points"));
  const double eps = c.num("params.epsilon"), A = c.num("params.A"), B = c.num("params.B"), lam = c.num("params.lambda");
  const int n_max = static_cast<int>(c.integer("params.n_max")), from = static_cast<int>(c.integer("params.decreasing_from"));
  auto& t = r.table("", {"n", "ray_sup", "closed_form", "strip_norm"});
  double worst = 0.0, step = -kInf, prev = kInf;
  for (int n = 0; n <= n_max; ++n) {
    auto res = hyperfunction_example(n, eps, A, B, lam, tr);
    const double closed = n == 0 ? 1.0 : std::pow(lam * n, n) * std::exp(-n);
    worst = std::max(worst, std::abs(res.ray_sup - closed) / closed);
    if (n > from) step = std::max(step, res.strip_norm.value - prev);
    prev = res.strip_norm.value;
    t.add({n, res.ray_sup, closed, res.strip_norm.value});
  }
  r.check_le("ray supremum against lambda^n n^n e^-n (relative)", worst, c.num("tolerances.ray_rel"));
  r.check_lt("largest increase of the strip norm for n >= " + std::to_string(from), step, 0.0);
}

}  // namespace

const std::vector<Scenario>& registry() {
  static const std::vector<Scenario> s{
      {"example1-divergence", "truncated Example 1 integral and cone norms of exp(-p1^2 - p2^3)", kExample1,
       run_example1},
      {"decompose-demo", "split of a test function along two cones", kDecompose, run_decompose},
      {"laplace-boundary", "boundary values of Laplace transforms of densities", kBoundary, run_boundary},
      {"check-transform", "check transform against the Laplace side of point masses", kCheck, run_check},
      {"wick-oracle", "D_K against brute-force Wick pairings", kWick, run_wick},
      {"coefficient-condition", "coefficient condition search", kCoefficient, run_coefficient},
      {"convergence-bound", "polynomial-coefficient inequalities and majorant series fits", kConvergence,
       run_convergence},
      {"lambda-constant", "cone constant lambda with a sampled certificate", kLambda, run_lambda},
      {"wightman-closed-form", "truncated Wick series against the exponential closed form", kWightman, run_wightman},
      {"schwinger-bounds", "growth bound fit for Schwinger functions", kSchwinger, run_schwinger},
      {"chronological-order", "chronological ordering ratio on a random corpus", kChrono, run_chrono},
      {"reconstruction", "Laplace side against u applied to check transforms", kReconstruction, run_reconstruction},
      {"boost-intertwine", "Euclidean rotations against boosts through the check transform", kBoost, run_boost},
      {"hyperfunction-example", "ray suprema and strip norms of p2^n e^-p1", kHyper, run_hyper},
  };
  return s;
}

}  // namespace eclab::harness
