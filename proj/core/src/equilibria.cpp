#include "sirsvax/equilibria.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace sirsvax {

namespace {

Equilibrium make_equilibrium(const State& x, double u,
                             const EpidemicParams& p) {
  Equilibrium eq;
  eq.point = x;
  const double j11 = -p.beta * x.i - u - p.eta;
  const double j12 = -p.beta * x.s - p.eta;
  const double j21 = p.beta * x.i;
  const double j22 = p.beta * x.s - p.gamma;
  const double half_trace = 0.5 * (j11 + j22);
  const double det = j11 * j22 - j12 * j21;
  const std::complex<double> root = std::sqrt(std::complex<double>(half_trace * half_trace - det, 0.0));
  eq.eigenvalues[0] = half_trace + root;
  eq.eigenvalues[1] = half_trace - root;
  eq.drift_norm = verify_equilibrium(x, u, p);
  return eq;
}

nlohmann::json equilibrium_json(const Equilibrium& eq) {
  nlohmann::json eig = nlohmann::json::array();
  for (const auto& ev : eq.eigenvalues) {
    eig.push_back({{"re", ev.real()}, {"im", ev.imag()}});
  }
  return {{"s", eq.point.s},
          {"i", eq.point.i},
          {"drift_norm", eq.drift_norm},
          {"jacobian_eigenvalues", eig},
          {"locally_stable", eq.locally_stable()}};
}

}  // namespace

double verify_equilibrium(const State& x, double u_inf,
                          const EpidemicParams& params) {
  const Drift d = drift_unchecked(x.s, x.i, u_inf, params);
  return std::hypot(d.ds, d.di);
}

EquilibriumReport equilibria(const EpidemicParams& params, double u_inf) {
  params.validate();
  if (!(u_inf >= 0.0 && u_inf <= params.u_max)) {
    throw std::invalid_argument("equilibria: u_inf outside [0, u_max]");
  }
  const double b = params.beta;
  const double g = params.gamma;
  const double e = params.eta;

  EquilibriumReport report;
  report.u_inf = u_inf;
  report.disease_free = make_equilibrium({e / (e + u_inf), 0.0}, u_inf, params);

  const double s_end = g / b;
  const double i_end = e / (g + e) * (1.0 - g / b) - g / (g + e) * u_inf / b;
  if (i_end > 0.0) report.endemic = make_equilibrium({s_end, i_end}, u_inf, params);

  if (u_inf == 0.0) {
    const bool endemic = b / g > 1.0;
    report.globally_stable = endemic ? StableBranch::kEndemic : StableBranch::kDiseaseFree;
    report.criterion = endemic ? "R_o = beta/gamma > 1" : "R_o = beta/gamma <= 1";
  } else if (report.endemic && u_inf < g) {
    report.globally_stable = StableBranch::kEndemic;
    report.criterion = "endemic i > 0 and u_inf < gamma";
  } else {
    report.globally_stable = StableBranch::kDiseaseFree;
    report.criterion = report.endemic ? "u_inf >= gamma" : "endemic i <= 0";
  }
  return report;
}

nlohmann::json to_json(const EquilibriumReport& report) {
  return {{"u_inf", report.u_inf},
          {"endemic", report.endemic ? equilibrium_json(*report.endemic)
                                     : nlohmann::json(nullptr)},
          {"disease_free", equilibrium_json(report.disease_free)},
          {"globally_stable", report.globally_stable == StableBranch::kEndemic
                                  ? "endemic"
                                  : "disease_free"},
          {"criterion", report.criterion}};
}

void write_equilibrium_json(const std::string& path,
                            const EquilibriumReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << to_json(report).dump(2) << '\n';
}

}  // namespace sirsvax
