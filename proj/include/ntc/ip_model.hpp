#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "ntc/observed.hpp"

namespace ntc {

namespace detail {

inline std::string lp_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Appends "+|- |coef| name" with LP-format sign conventions.
inline void lp_term(std::string& out, bool first, double coef,
                    const std::string& name) {
  if (first) {
    if (coef < 0.0) {
      out += "- " + lp_number(-coef);
    } else {
      out += lp_number(coef);
    }
  } else {
    if (coef < 0.0) {
      out += " - " + lp_number(-coef);
    } else {
      out += " + " + lp_number(coef);
    }
  }
  out += " " + name;
}

}  // namespace detail

/// Writes the vertex-minimization integer program restricted to the observed
/// index set, in LP text format. Variables: phi_t (one per unique index,
/// 1-based) and theta_k_j (one per mode coordinate, binary, all declared).
/// For every t: lambda * sum_k theta_k_{x_k} - phi_t <= lambda * (p - 1)
/// and phi_t <= lambda * theta_k_{x_k} for each mode k.
inline std::string emit_ip_model(std::span<const double> scaled_gradient,
                                 const ObservedData& data, double lambda) {
  const int p = data.order();
  const int u = data.u();
  std::string out;
  out += "\\ vertex minimization over the observed index set\n";
  out += "Minimize\n obj: ";
  if (u == 0) {
    out += "0 dummy";
  }
  for (int t = 0; t < u; ++t) {
    detail::lp_term(out, t == 0, scaled_gradient[static_cast<std::size_t>(t)],
                    "phi_" + std::to_string(t + 1));
  }
  out += "\nSubject To\n";
  for (int t = 0; t < u; ++t) {
    const std::string phi = "phi_" + std::to_string(t + 1);
    std::string row = " lb_" + std::to_string(t + 1) + ": ";
    for (int k = 0; k < p; ++k) {
      detail::lp_term(row, k == 0, lambda,
                      "theta_" + std::to_string(k + 1) + "_" +
                          std::to_string(data.coord(t, k) + 1));
    }
    detail::lp_term(row, false, -1.0, phi);
    row += " <= " + detail::lp_number(lambda * (p - 1)) + "\n";
    out += row;
    for (int k = 0; k < p; ++k) {
      std::string ub = " ub_" + std::to_string(t + 1) + "_" +
                       std::to_string(k + 1) + ": ";
      detail::lp_term(ub, true, 1.0, phi);
      detail::lp_term(ub, false, -lambda,
                      "theta_" + std::to_string(k + 1) + "_" +
                          std::to_string(data.coord(t, k) + 1));
      ub += " <= 0\n";
      out += ub;
    }
  }
  out += "Bounds\n";
  for (int t = 0; t < u; ++t) {
    out += " 0 <= phi_" + std::to_string(t + 1) +
           " <= " + detail::lp_number(lambda) + "\n";
  }
  out += "Binaries\n";
  for (int k = 0; k < p; ++k) {
    out += ' ';
    for (int j = 0; j < data.shape().dim(k); ++j) {
      if (j > 0) out += ' ';
      out += "theta_" + std::to_string(k + 1) + "_" + std::to_string(j + 1);
    }
    out += '\n';
  }
  out += "End\n";
  return out;
}

}  // namespace ntc
