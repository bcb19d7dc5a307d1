#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "sirsvax/model.hpp"

namespace sirsvax {

struct Equilibrium {
  State point;
  /// Eigenvalues of the drift Jacobian at `point` under the constant control.
  std::complex<double> eigenvalues[2];
  double drift_norm = 0.0;

  [[nodiscard]] bool locally_stable() const {
    return eigenvalues[0].real() < 0.0 && eigenvalues[1].real() < 0.0;
  }
};

enum class StableBranch { kEndemic, kDiseaseFree };

struct EquilibriumReport {
  double u_inf = 0.0;
  std::optional<Equilibrium> endemic;  ///< present only when its i > 0
  Equilibrium disease_free;
  StableBranch globally_stable = StableBranch::kDiseaseFree;
  std::string criterion;  ///< which rule produced the label
};

/// Equilibria of the system under the constant control u_inf:
///   endemic      (gamma/beta, eta/(gamma+eta)(1 - gamma/beta)
///                              - gamma/(gamma+eta) u_inf/beta)
///   disease-free (eta/(eta + u_inf), 0)
/// The stability label follows the threshold rules (R_o for u_inf = 0,
/// u_inf < gamma otherwise); Jacobian eigenvalues are reported alongside.
EquilibriumReport equilibria(const EpidemicParams& params, double u_inf);

/// Euclidean norm of the drift at `x` under constant control u_inf.
double verify_equilibrium(const State& x, double u_inf,
                          const EpidemicParams& params);

nlohmann::json to_json(const EquilibriumReport& report);
void write_equilibrium_json(const std::string& path,
                            const EquilibriumReport& report);

}  // namespace sirsvax
