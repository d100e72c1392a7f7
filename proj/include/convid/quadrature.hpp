#pragma once

// Composite Newton-Cotes style rules on uniformly sampled segments.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace convid::quad {

/// h * integral of the local interpolant over each unit interval [j, j+1]
/// of the samples f. Uses six-point stencils (exact for quintics) when the
/// segment has at least six samples, four-point stencils for four or five,
/// and the trapezoid rule otherwise. Result has f.size()-1 entries.
std::vector<std::complex<double>> interval_integrals(std::span<const std::complex<double>> f,
                                                     double h);

/// Cumulative integral of f from index `anchor`, written to out (same size
/// as f). out[anchor] is exactly zero.
void cumulative_from(std::span<const std::complex<double>> f, double h, std::size_t anchor,
                     std::span<std::complex<double>> out);

/// As above, but intervals touching a node flagged in `rough` use the
/// trapezoid rule and the high-order stencils never reach across them.
void cumulative_from(std::span<const std::complex<double>> f, double h, std::size_t anchor,
                     std::span<const std::uint8_t> rough, std::span<std::complex<double>> out);

}  // namespace convid::quad
