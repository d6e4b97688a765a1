#pragma once

// Nonlocal sources and full tendencies for the Camassa-Holm, b-family and
// Novikov equations in transport form:
//   CH / b-family:  u_t = -u u_x - d_x (1 - d_x^2)^{-1} (b/2 u^2 + (3-b)/2 u_x^2)
//   Novikov:        u_t = -u^2 u_x - (1 - d_x^2)^{-1} (1/2 u_x^3 + d_x (3/2 u u_x^2 + u^3))
// Products are formed on the grid and truncated to the model's dealias band.

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "besovlab/initial_data.hpp"
#include "besovlab/spectral.hpp"

namespace besovlab {

struct CamassaHolm {};
struct BFamily {
  double b = 2.0;
};
struct Novikov {};

using ModelKind = std::variant<CamassaHolm, BFamily, Novikov>;

inline ModelKind degasperis_procesi() { return BFamily{3.0}; }

inline bool is_cubic(const ModelKind& model) { return std::holds_alternative<Novikov>(model); }

inline double default_dealias_fraction(const ModelKind& model) {
  return is_cubic(model) ? kCubicDealias : kQuadraticDealias;
}

inline std::string model_name(const ModelKind& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CamassaHolm>) {
          return "camassa-holm";
        } else if constexpr (std::is_same_v<T, BFamily>) {
          std::string b = std::to_string(m.b);
          b.erase(b.find_last_not_of('0') + 1);
          if (!b.empty() && b.back() == '.') b.pop_back();
          return "b-family(b=" + b + ")";
        } else {
          return "novikov";
        }
      },
      model);
}

inline constexpr double kUnderResolvedFraction = 1e-6;

namespace detail {

inline SpectralField truncate_product(const RealField& product, double fraction, const char* what) {
  const SpectralField full = forward_transform(product);
  const double cutoff = dealias_cutoff(full.grid(), fraction);
  const double lost = energy_fraction_above(full, cutoff);
  if (lost > kUnderResolvedFraction) {
    warn(std::string("under-resolved nonlinearity in ") + what + ": relative energy " +
         short_number(lost) + " above the dealias cutoff");
  }
  return dealias(full, fraction);
}

// -d_x (1 - d_x^2)^{-1}
inline SpectralField nonlocal_gradient(const SpectralField& F) {
  return apply_multiplier(F, [](double xi) { return complex(0.0, -xi / (1.0 + xi * xi)); });
}

struct Faces {
  RealField u;
  RealField ux;
};

inline Faces faces(const SpectralField& u) { return {inverse_transform(u), inverse_transform(derivative(u))}; }

inline SpectralField quadratic_source(const Faces& f, double a_u2, double a_ux2, double fraction) {
  RealField s(f.u.grid());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = a_u2 * f.u[i] * f.u[i] + a_ux2 * f.ux[i] * f.ux[i];
  }
  return nonlocal_gradient(truncate_product(s, fraction, "quadratic source"));
}

inline SpectralField cubic_source(const Faces& f, double fraction) {
  RealField inner(f.u.grid());
  RealField outer(f.u.grid());
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const double u = f.u[i];
    const double ux = f.ux[i];
    outer[i] = 0.5 * ux * ux * ux;
    inner[i] = 1.5 * u * ux * ux + u * u * u;
  }
  const SpectralField a = truncate_product(outer, fraction, "Novikov source");
  const SpectralField b = derivative(truncate_product(inner, fraction, "Novikov source"));
  return -1.0 * helmholtz_inverse(a + b);
}

}  // namespace detail

// P(u) = -d_x (1 - d_x^2)^{-1} (u^2 + 1/2 u_x^2)
inline SpectralField source_P(const SpectralField& u, double fraction = kQuadraticDealias) {
  return detail::quadratic_source(detail::faces(u), 1.0, 0.5, fraction);
}

inline SpectralField source_b(const SpectralField& u, double b, double fraction = kQuadraticDealias) {
  return detail::quadratic_source(detail::faces(u), 0.5 * b, 0.5 * (3.0 - b), fraction);
}

// Q(u) = -(1 - d_x^2)^{-1} (1/2 u_x^3 + d_x (3/2 u u_x^2 + u^3))
inline SpectralField source_Q(const SpectralField& u, double fraction = kCubicDealias) {
  return detail::cubic_source(detail::faces(u), fraction);
}

inline RealField source_P(const RealField& u) { return inverse_transform(source_P(forward_transform(u))); }
inline RealField source_b(const RealField& u, double b) {
  return inverse_transform(source_b(forward_transform(u), b));
}
inline RealField source_Q(const RealField& u) { return inverse_transform(source_Q(forward_transform(u))); }

// Full right-hand side du/dt, truncated to the dealias band.
inline SpectralField tendency(const SpectralField& u, const ModelKind& model, double fraction) {
  const detail::Faces f = detail::faces(u);
  RealField transport(u.grid());
  const bool cubic = is_cubic(model);
  for (std::size_t i = 0; i < transport.size(); ++i) {
    transport[i] = cubic ? f.u[i] * f.u[i] * f.ux[i] : f.u[i] * f.ux[i];
  }
  SpectralField source = std::visit(
      [&](const auto& m) -> SpectralField {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CamassaHolm>) {
          return detail::quadratic_source(f, 1.0, 0.5, fraction);
        } else if constexpr (std::is_same_v<T, BFamily>) {
          return detail::quadratic_source(f, 0.5 * m.b, 0.5 * (3.0 - m.b), fraction);
        } else {
          return detail::cubic_source(f, fraction);
        }
      },
      model);
  source -= detail::truncate_product(transport, fraction, "transport term");
  return source;
}

inline SpectralField tendency(const SpectralField& u, const ModelKind& model) {
  return tendency(u, model, default_dealias_fraction(model));
}

inline RealField tendency(const RealField& u, const ModelKind& model) {
  return inverse_transform(tendency(forward_transform(u), model));
}

}  // namespace besovlab
