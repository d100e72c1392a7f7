#include "convid/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cassert>

namespace convid::quad {
namespace {

using cplx = std::complex<double>;

// Weights (scaled by 1440) for the integral over [t, t+1] of the quintic
// through nodes 0..5.
constexpr std::array<std::array<double, 6>, 5> kSix{{
    {475.0, 1427.0, -798.0, 482.0, -173.0, 27.0},
    {-27.0, 637.0, 1022.0, -258.0, 77.0, -11.0},
    {11.0, -93.0, 802.0, 802.0, -93.0, 11.0},
    {-11.0, 77.0, -258.0, 1022.0, 637.0, -27.0},
    {27.0, -173.0, 482.0, -798.0, 1427.0, 475.0},
}};

// Same for the cubic through nodes 0..3, scaled by 24.
constexpr std::array<std::array<double, 4>, 3> kFour{{
    {9.0, 19.0, -5.0, 1.0},
    {-1.0, 13.0, 13.0, -1.0},
    {1.0, -5.0, 19.0, 9.0},
}};

}  // namespace

std::vector<cplx> interval_integrals(std::span<const cplx> f, double h) {
  const std::size_t m = f.size();
  if (m < 2) return {};
  std::vector<cplx> out(m - 1);
  if (m >= 6) {
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const std::size_t s = std::min(j >= 2 ? j - 2 : 0, m - 6);
      const auto& w = kSix[j - s];
      cplx acc = 0.0;
      for (std::size_t q = 0; q < 6; ++q) acc += w[q] * f[s + q];
      out[j] = acc * (h / 1440.0);
    }
  } else if (m >= 4) {
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const std::size_t s = std::min(j >= 1 ? j - 1 : 0, m - 4);
      const auto& w = kFour[j - s];
      cplx acc = 0.0;
      for (std::size_t q = 0; q < 4; ++q) acc += w[q] * f[s + q];
      out[j] = acc * (h / 24.0);
    }
  } else {
    for (std::size_t j = 0; j + 1 < m; ++j) out[j] = 0.5 * h * (f[j] + f[j + 1]);
  }
  return out;
}

namespace {

void accumulate(const std::vector<cplx>& pieces, std::size_t anchor, std::span<cplx> out);

}  // namespace

void cumulative_from(std::span<const cplx> f, double h, std::size_t anchor, std::span<cplx> out) {
  assert(out.size() == f.size() && anchor < f.size());
  accumulate(interval_integrals(f, h), anchor, out);
}

void cumulative_from(std::span<const cplx> f, double h, std::size_t anchor, std::span<const std::uint8_t> rough,
                     std::span<cplx> out) {
  assert(out.size() == f.size() && rough.size() == f.size() && anchor < f.size());
  std::vector<cplx> pieces(f.size() > 0 ? f.size() - 1 : 0);
  std::size_t p = 0;
  while (p + 1 < f.size()) {
    if (rough[p] || rough[p + 1]) {
      pieces[p] = 0.5 * h * (f[p] + f[p + 1]);
      ++p;
      continue;
    }
    std::size_t q = p + 1;
    while (q < f.size() && !rough[q]) ++q;
    const auto inner = interval_integrals(f.subspan(p, q - p), h);
    std::copy(inner.begin(), inner.end(), pieces.begin() + static_cast<std::ptrdiff_t>(p));
    p = q - 1;
  }
  accumulate(pieces, anchor, out);
}

namespace {

void accumulate(const std::vector<cplx>& pieces, std::size_t anchor, std::span<cplx> out) {
  out[anchor] = 0.0;
  cplx acc = 0.0;
  for (std::size_t j = anchor; j + 1 < out.size(); ++j) {
    acc += pieces[j];
    out[j + 1] = acc;
  }
  acc = 0.0;
  for (std::size_t j = anchor; j > 0; --j) {
    acc -= pieces[j - 1];
    out[j - 1] = acc;
  }
}

}  // namespace

}  // namespace convid::quad
