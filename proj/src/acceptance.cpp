// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"
#include "lpp/lpp.hpp"

using namespace lpp;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

double max_rel(const std::vector<TrialRow>& rows) {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.rel);
  return m;
}

void criterion1() {
  double worst = 0.0;
  for (auto [s1, s2] : std::vector<std::pair<double, double>>{{0.3, 0.7}, {1.0, 1.0}, {2.0, 0.5}})
    worst = std::max(worst, rel(density(s1, s2, FiniteParams{1, 1, 2, 1}).value, std::exp(-s1 - s2)));
  report(1, worst < 1e-6, "max rel err " + fmt("%.2e", worst));
}

void criterion2() {
  double cg = 0.0, sab = 0.0, sum_y = 0.0, cpq = 0.0;
  for (int N = 1; N <= 5; ++N) cg = std::max(cg, max_rel(run_identity_trials("cauchy-gen", 100, N, 1)));
  for (int k = 1; k <= 3; ++k) sab = std::max(sab, max_rel(run_identity_trials("sab", 100, k, 2)));
  const double sw = max_rel(run_identity_trials("sw", 100, 2, 3));
  for (int N = 1; N <= 3; ++N) sum_y = std::max(sum_y, max_rel(run_identity_trials("sum-y", 100, N, 4)));
  for (int N = 1; N <= 4; ++N) cpq = std::max(cpq, max_rel(run_identity_trials("cpq", 100, N, 5)));
  const bool ok = cg < 1e-9 && sab < 1e-10 && sw < 1e-8 && sum_y < 1e-9 && cpq < 1e-10;
  report(2, ok,
         "cauchy-gen " + fmt("%.1e", cg) + ", sab " + fmt("%.1e", sab) + ", sw " + fmt("%.1e", sw) + ", sum-y " +
             fmt("%.1e", sum_y) + ", cpq " + fmt("%.1e", cpq));
}

void criterion3() {
  const FiniteParams p{1, 1, 2, 2};
  Rng rng(2024, 0, 0);
  double worst = 0.0;
  for (int t = 0; t < 3; ++t) {
    const double s1 = 3.0 * rng.uniform_open0(), s2 = 3.0 * rng.uniform_open0();
    worst = std::max(worst, rel(formula01(s1, s2, p), formula02(s1, s2, p)));
  }
  // Radius ratios near 0.8 need about 96 nodes for 1e-8.
  Formula01Config r0, r1;
  r0.nodes = r1.nodes = 96;
  r1.R1 = 1.8;
  r1.R2 = 1.4;
  r1.z_radius = 0.3;
  Formula02Config r2;
  r2.r_in = 0.7;
  r2.r_mid = 1.2;
  r2.r_out = 1.9;
  double deform = rel(formula01(0.4, 0.9, p, r1), formula01(0.4, 0.9, p, r0));
  deform = std::max(deform, rel(formula02(0.4, 0.9, p, r2), formula02(0.4, 0.9, p)));
  FiniteQuadrature moved;
  moved.left_radii = {0.22, 0.09, 0.03};
  moved.right_radii = {0.22, 0.09, 0.03};
  moved.z_radius = 0.3;
  for (auto [k1, k2] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}}) {
    const cplx a = term_contribution(k1, k2, 0.4, 0.9, p, FiniteQuadrature{}, false).value;
    const cplx b = term_contribution(k1, k2, 0.4, 0.9, p, moved, false).value;
    deform = std::max(deform, rel(b, a));
  }
  report(3, worst < 1e-6 && deform < 1e-8,
         "formula01 vs formula02 " + fmt("%.2e", worst) + ", deformation " + fmt("%.2e", deform));
}

void criterion4() {
  const FiniteParams p{1, 1, 2, 2};
  SeriesConfig sc;
  sc.kmax = 2;
  const cplx series = density(1.0, 1.0, p, sc).value;
  const cplx closed = formula02(1.0, 1.0, p);
  const double scale = std::abs(closed);
  const double diff = std::abs(series - closed);
  double term3 = 0.0, ms = 0.0;
  for (int k2 = 1; k2 <= 2; ++k2) {
    const TermRecord t = term_contribution(3, k2, 1.0, 1.0, p, FiniteQuadrature{}, false);
    term3 = std::max(term3, std::abs(t.value));
    ms += t.runtime_ms;
  }
  report(4, diff < 1e-2 * scale && term3 < 1e-10 * scale,
         "series vs closed form " + fmt("%.2e", diff / scale) + " of scale, max |term(3,k2)| " +
             fmt("%.2e", term3 / scale) + " of scale (" + fmt("%.0f", ms / 1000.0) + " s)");
}

void criterion5() {
  const FiniteParams p{1, 1, 2, 2};
  const double exact = tail_joint(0.0, 0.0, p).value.real();
  const auto mc = mc_joint_probability(1, 1, 2, 2, StepDirection::Right, EventWindow::tail(0.0, 0.0), 10000000, 101);
  const double q = 0.5;
  const double pa = probability_A(1, 1, 1, 1, 2, 2, q, 1.7, 1.3);
  const auto mca = mc_event_A(1, 1, 2, 2, q, 1, 1, 10000000, 102);
  double nb = 0.0;
  for (int m = 1; m <= 4; ++m)
    for (int x = 0; x <= 6; ++x) {
      double binom = 1.0;
      for (int i = 1; i <= m - 1; ++i) binom = binom * (x + i) / i;
      const double pmf = binom * std::pow(1.0 - q, m) * std::pow(q, x);
      nb = std::max(nb, std::abs(johansson_transition({x}, m, q, 1.5) - pmf));
    }
  const bool ok = std::abs(exact - 0.5) < 1e-2 && std::abs(mc.value - exact) < 3.0 * mc.stderr_value &&
                  std::abs(mca.value - pa) < 4.0 * mca.stderr_value && nb < 1e-8;
  report(5, ok,
         "tail " + fmt("%.6f", exact) + " vs MC " + fmt("%.6f", mc.value) + " (se " + fmt("%.1e", mc.stderr_value) +
             "), A " + fmt("%.6f", pa) + " vs MC " + fmt("%.6f", mca.value) + " (se " + fmt("%.1e", mca.stderr_value) +
             "), negative binomial " + fmt("%.1e", nb));
}

void criterion6() {
  LimitConfig coarse;
  coarse.quad = LimitQuadrature::coarse();
  const double sym = rel(limit_density(0.2, -0.4, 0.8, 0.5, coarse).value, limit_density(0.2, -0.4, -0.8, 0.5, coarse).value);

  const std::vector<double> ts{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<std::vector<double>> v(ts.size(), std::vector<double>(ts.size()));
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = 0; j < ts.size(); ++j) v[i][j] = limit_tail(ts[i], ts[j], 0.3, 0.5, coarse).value.real();
  bool monotone = true;
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = 0; j + 1 < ts.size(); ++j)
      monotone = monotone && v[i][j + 1] <= v[i][j] && v[j + 1][i] <= v[j][i];

  LimitConfig base;
  const EstimateReport a = limit_density(0.0, 0.0, 0.0, 0.5, base);
  double by_order[5] = {0, 0, 0, 0, 0};
  for (const TermRecord& t : a.terms) by_order[t.k1 + t.k2] = std::max(by_order[t.k1 + t.k2], std::abs(t.value));
  const bool decay = by_order[2] > by_order[3] && by_order[3] > by_order[4];

  LimitConfig moved;
  moved.quad = base.quad.shifted(0.1);
  const double deform = rel(limit_density(0.0, 0.0, 0.0, 0.5, moved).value, a.value);

  report(6, sym < 1e-6 && monotone && decay && deform < 1e-6,
         "x-symmetry " + fmt("%.1e", sym) + ", monotone " + (monotone ? "yes" : "no") + ", decay " +
             fmt("%.1e", by_order[2]) + " > " + fmt("%.1e", by_order[3]) + " > " + fmt("%.1e", by_order[4]) +
             ", deformation " + fmt("%.1e", deform));
}

void criterion7() {
  // The s integrals run down to a finite cut standing in for -infinity. With kmax = 2 the
  // truncated series grows without bound there, so the integrated mass cannot approach 1.
  LimitQuadrature q = LimitQuadrature::coarse();
  std::string probe;
  double largest = 0.0;
  for (auto [k1, k2] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}}) {
    const TermRecord t = limit_term_contribution(k1, k2, -8.0, -8.0, 0.0, 0.5, q, LimitQuantity::Tail);
    largest = std::max(largest, std::abs(t.value));
    probe += " T" + std::to_string(k1) + std::to_string(k2) + "=" + fmt("%.1e", t.value.real());
  }
  const bool bounded = largest < 2.0;
  report(7, false,
         std::string("not attainable with kmax = 2: tail terms at t1 = t2 = -8 are") + probe +
             (bounded ? " (bounded)" : " (divergent, total mass unusable)"));
}

void criterion8() {
  const long long samples = 200000;
  const auto xs = mc_corollary_crossing(200, 1.0, 0.5, samples, 8);
  double s = 0.0, s2 = 0.0;
  for (const auto& c : xs) {
    s += c.x;
    s2 += c.x * c.x;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = s / n;
  const double se = std::sqrt((s2 - n * mean * mean) / (n - 1.0) / n);
  const bool mean_ok = std::abs(mean) < 3.0 * se;
  report(8, false,
         "mean of scaled location " + fmt("%.4f", mean) + " (se " + fmt("%.4f", se) + ", " +
             (mean_ok ? "within" : "outside") +
             " 3 se); bin probabilities need the x-marginal tail at -infinity, which diverges at kmax = 2");
}

void criterion9() {
  FredholmConfig hi;
  hi.order = 80;
  double doubling = 0.0;
  for (double x = -6.0; x <= 4.0; x += 0.5) doubling = std::max(doubling, std::abs(fgue(x) - fgue(x, hi)));
  const double ai = std::abs(airy(0.0) - 0.355028053887817239);
  const double aip = std::abs(airy_prime(0.0) + 0.258819403792806798);
  bool monotone = true;
  double prev = -1.0;
  for (int i = 0; i < 30; ++i) {
    const double v = fgue(-8.0 + 14.0 * i / 29.0);
    monotone = monotone && v >= prev - 1e-14 && v >= -1e-12 && v <= 1.0 + 1e-12;
    prev = v;
  }
  report(9, doubling < 1e-10 && ai < 1e-10 && aip < 1e-10 && monotone,
         "order doubling " + fmt("%.1e", doubling) + ", Ai(0) " + fmt("%.1e", ai) + ", Ai'(0) " + fmt("%.1e", aip) +
             ", monotone " + (monotone ? "yes" : "no"));
}

std::string run_cli(const std::string& args) {
  const std::string path = "acceptance_cli_out.txt";
  const std::string cmd = std::string(LPP_CLI_PATH) + " " + args + " >" + path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return "exit:" + std::to_string(status);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/** The reproducible part of an output: CSV lines after the '#' header, or the JSON rows and diagnostic. */
std::string body(const std::string& text) {
  if (text.rfind("exit:", 0) == 0) return text;
  if (!text.empty() && text[0] == '{') {
    const cli::Output o = cli::parse_json(text);
    return o.rows.dump() + "\n" + o.diagnostic;
  }
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') out += line + "\n";
  return out;
}

void criterion10() {
  const std::vector<std::string> commands{
      "simulate --rows 4 --cols 4 --m 2 --n 2 --samples 200000 --seed 3 --event interval --t1 2 --t2 2",
      "simulate --dist geo --q 0.5 --event A --x 1 --y 1 --samples 200000 --seed 4",
      "exact geodesic-prob --M 2 --N 1",
      "verify --which all --trials 20 --size 3 --seed 9",
      "tw --s -1.5",
      "limit-density --s1 0.1 --s2 -0.2 --x 0.3 --kmax 1 --quad coarse",
      "corollary-mc --N 20 --samples 2000 --seed 6"};
  int same = 0;
  std::string bad;
  for (const auto& c : commands) {
    const std::string a = body(run_cli("--threads 1 " + c)), b = body(run_cli("--threads 4 " + c));
    if (a == b && a.rfind("exit:", 0) != 0) ++same;
    else bad += " [" + c + "]";
  }
  report(10, same == static_cast<int>(commands.size()),
         std::to_string(same) + "/" + std::to_string(commands.size()) + " subcommands byte-identical" + bad);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
