// Copyright 2026 The ppdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ppdl/candidates.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "absl/strings/str_format.h"
#include "ppdl/status_macros.h"

namespace ppdl {
namespace {

// Upper bound on raw covariance-grid tuples examined before PD filtering.
constexpr double kMaxRawCovarianceTuples = 5e7;

int WidthFor(size_t size) {
  int w = 0;
  while ((size_t{1} << w) < size) ++w;
  return w;
}

std::vector<double> AnchoredValues(double lo, double hi, double step) {
  std::vector<double> out;
  if (lo <= 0.0 && hi >= 0.0) {
    const auto first = static_cast<long>(std::ceil(lo / step - 1e-9));
    const auto last = static_cast<long>(std::floor(hi / step + 1e-9));
    for (long j = first; j <= last; ++j) out.push_back(j * step);
  } else {
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long j = 0; j <= count; ++j) out.push_back(lo + j * step);
  }
  return out;
}

int NearestToZero(const std::vector<double>& values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (std::abs(values[i]) < std::abs(values[best])) best = i;
  }
  return best;
}

struct Frame {
  Eigen::VectorXd mean;
  Eigen::MatrixXd sqrt_cov;
  Eigen::MatrixXd inv_sqrt_cov;
};

Frame MakeFrame(const GaussianParams& anchor) {
  Frame f;
  f.mean = anchor.mean();
  if (anchor.dim() == 1) {
    const double s = std::sqrt(anchor.covariance()(0, 0));
    f.sqrt_cov = Eigen::MatrixXd::Constant(1, 1, s);
    f.inv_sqrt_cov = Eigen::MatrixXd::Constant(1, 1, 1.0 / s);
    return f;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(anchor.covariance());
  const Eigen::VectorXd root = eig.eigenvalues().cwiseSqrt();
  f.sqrt_cov =
      eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
  f.inv_sqrt_cov = eig.eigenvectors() * root.cwiseInverse().asDiagonal() *
                   eig.eigenvectors().transpose();
  return f;
}

int UpperEntries(int d) { return d * (d + 1) / 2; }

Eigen::MatrixXd CorrectionMatrix(int d, const std::vector<double>& sigma,
                                 std::span<const int> tuple) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
  int e = 0;
  for (int r = 0; r < d; ++r) {
    for (int c = r; c < d; ++c, ++e) {
      const double v = sigma[tuple[e]];
      m(r, c) += v;
      if (c != r) m(c, r) += v;
    }
  }
  return m;
}

bool IsPositiveDefinite(const Eigen::MatrixXd& m) {
  if (m.rows() == 1) return m(0, 0) > 1e-9;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() > 1e-9;
}

// Advances a mixed-radix counter (last digit fastest); false on wrap-around.
bool NextTuple(std::vector<int>& digits, std::span<const size_t> radix) {
  for (int i = static_cast<int>(digits.size()) - 1; i >= 0; --i) {
    if (++digits[i] < static_cast<int>(radix[i])) return true;
    digits[i] = 0;
  }
  return false;
}

struct GridTables {
  int dim = 1;
  std::vector<double> mu;
  std::vector<double> sigma;
  std::vector<std::vector<int>> mean_tuples;
  std::vector<std::vector<int>> cov_tuples;  // PD corrections only
};

absl::StatusOr<GridTables> BuildTables(int dim, const GridSpec& grid,
                                       size_t cap) {
  PPDL_RETURN_IF_ERROR(grid.Validate());
  GridTables t;
  t.dim = dim;
  t.mu = grid.MuValues();
  t.sigma = grid.SigmaValues();
  const double mean_count = std::pow(static_cast<double>(t.mu.size()), dim);
  const int entries = UpperEntries(dim);
  const double raw_cov = std::pow(static_cast<double>(t.sigma.size()), entries);
  if (mean_count * raw_cov > static_cast<double>(cap) &&
      (raw_cov > kMaxRawCovarianceTuples ||
       mean_count > static_cast<double>(cap))) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "candidate cap exceeded: grid has up to %.0f candidates (cap %d)",
        mean_count * raw_cov, cap));
  }
  {
    std::vector<size_t> radix(entries, t.sigma.size());
    std::vector<int> tuple(entries, 0);
    do {
      if (IsPositiveDefinite(CorrectionMatrix(dim, t.sigma, tuple))) {
        t.cov_tuples.push_back(tuple);
      }
    } while (NextTuple(tuple, radix));
  }
  const double total = mean_count * static_cast<double>(t.cov_tuples.size());
  if (total > static_cast<double>(cap)) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "candidate cap exceeded: grid needs a cap of at least %.0f (cap %d)",
        total, cap));
  }
  if (t.cov_tuples.empty()) {
    return absl::InvalidArgumentError(
        "covariance grid has no positive definite correction");
  }
  std::vector<size_t> radix(dim, t.mu.size());
  std::vector<int> tuple(dim, 0);
  do {
    t.mean_tuples.push_back(tuple);
  } while (NextTuple(tuple, radix));
  return t;
}

absl::StatusOr<GaussianParams> BuildCandidate(const Frame& frame,
                                              const GridTables& t,
                                              std::span<const int> mean_tuple,
                                              std::span<const int> cov_tuple) {
  const int d = t.dim;
  Eigen::VectorXd delta(d);
  for (int i = 0; i < d; ++i) delta(i) = t.mu[mean_tuple[i]];
  Eigen::VectorXd mean = frame.mean + frame.sqrt_cov * delta;
  Eigen::MatrixXd cov =
      frame.sqrt_cov * CorrectionMatrix(d, t.sigma, cov_tuple) * frame.sqrt_cov;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return GaussianParams::Create(std::move(mean), std::move(cov));
}

Bitstring PackBits(const GridSpec& grid, int dim,
                   std::span<const int> grid_indices) {
  const auto mu_size = grid.MuValues().size();
  const auto sigma_size = grid.SigmaValues().size();
  const int mu_w = WidthFor(mu_size);
  const int sigma_w = WidthFor(sigma_size);
  const int mu_center = grid.MuCenter();
  const int sigma_center = grid.SigmaCenter();
  Bitstring bits;
  auto push = [&bits](size_t code, int width) {
    for (int b = width - 1; b >= 0; --b) bits.push_back((code >> b) & 1U);
  };
  for (int i = 0; i < dim; ++i) {
    const size_t code = (grid_indices[i] - mu_center + mu_size) % mu_size;
    push(code, mu_w);
  }
  for (int e = 0; e < UpperEntries(dim); ++e) {
    const size_t code =
        (grid_indices[dim + e] - sigma_center + sigma_size) % sigma_size;
    push(code, sigma_w);
  }
  return bits;
}

absl::StatusOr<std::vector<int>> UnpackBits(const GridSpec& grid, int dim,
                                            const Bitstring& bits) {
  const auto mu_size = grid.MuValues().size();
  const auto sigma_size = grid.SigmaValues().size();
  const int mu_w = WidthFor(mu_size);
  const int sigma_w = WidthFor(sigma_size);
  size_t pos = 0;
  std::vector<int> out;
  auto pull = [&](int width, size_t size, int center) -> absl::Status {
    size_t code = 0;
    for (int b = 0; b < width; ++b) code = (code << 1) | bits[pos++];
    if (code >= size) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "bit field value %d is outside a grid of %d points", code, size));
    }
    out.push_back(static_cast<int>((code + center) % size));
    return absl::OkStatus();
  };
  for (int i = 0; i < dim; ++i) {
    PPDL_RETURN_IF_ERROR(pull(mu_w, mu_size, grid.MuCenter()));
  }
  for (int e = 0; e < UpperEntries(dim); ++e) {
    PPDL_RETURN_IF_ERROR(pull(sigma_w, sigma_size, grid.SigmaCenter()));
  }
  return out;
}

absl::StatusOr<CandidateSet> EnumerateGrid(const GaussianParams& anchor,
                                           const GridSpec& grid, size_t cap,
                                           std::optional<size_t> forwarded) {
  const int d = anchor.dim();
  PPDL_ASSIGN_OR_RETURN(const GridTables t, BuildTables(d, grid, cap));
  const Frame frame = MakeFrame(anchor);
  CandidateSet out;
  const size_t total = t.mean_tuples.size() * t.cov_tuples.size();
  out.hypotheses.reserve(total);
  out.provenance.reserve(total);
  std::vector<size_t> all_indices;
  if (forwarded.has_value()) {
    all_indices.resize(*forwarded);
    std::iota(all_indices.begin(), all_indices.end(), size_t{0});
  }
  for (const auto& mt : t.mean_tuples) {
    for (const auto& ct : t.cov_tuples) {
      PPDL_ASSIGN_OR_RETURN(GaussianParams g, BuildCandidate(frame, t, mt, ct));
      Provenance prov;
      prov.grid_indices = mt;
      prov.grid_indices.insert(prov.grid_indices.end(), ct.begin(), ct.end());
      if (forwarded.has_value()) {
        prov.encoding =
            Encoding{all_indices, PackBits(grid, d, prov.grid_indices)};
      }
      out.hypotheses.emplace_back(std::move(g));
      out.provenance.push_back(std::move(prov));
    }
  }
  return out;
}

}  // namespace

absl::Status GridSpec::Validate() const {
  if (!(mu_step > 0.0) || !(sigma_step > 0.0)) {
    return absl::InvalidArgumentError("grid steps must be positive");
  }
  if (!(mu_range >= 0.0) || !std::isfinite(mu_range)) {
    return absl::InvalidArgumentError("mu_range must be finite and >= 0");
  }
  if (!(sigma_hi >= sigma_lo) || !std::isfinite(sigma_lo) ||
      !std::isfinite(sigma_hi)) {
    return absl::InvalidArgumentError("sigma range is empty");
  }
  return absl::OkStatus();
}

std::vector<double> GridSpec::MuValues() const {
  return AnchoredValues(-mu_range, mu_range, mu_step);
}

std::vector<double> GridSpec::SigmaValues() const {
  return AnchoredValues(sigma_lo, sigma_hi, sigma_step);
}

int GridSpec::MuCenter() const { return NearestToZero(MuValues()); }
int GridSpec::SigmaCenter() const { return NearestToZero(SigmaValues()); }

std::string BitsToHex(const Bitstring& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (size_t i = 0; i < bits.size(); i += 4) {
    int nibble = 0;
    for (size_t j = 0; j < 4; ++j) {
      nibble <<= 1;
      if (i + j < bits.size()) nibble |= bits[i + j];
    }
    out.push_back(kDigits[nibble]);
  }
  return out;
}

absl::StatusOr<Bitstring> HexToBits(std::string_view hex, int length) {
  if (length < 0 || hex.size() != static_cast<size_t>((length + 3) / 4)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "hex string of %d digits cannot hold %d bits", hex.size(), length));
  }
  Bitstring bits;
  for (char ch : hex) {
    int v;
    if (ch >= '0' && ch <= '9') {
      v = ch - '0';
    } else if (ch >= 'a' && ch <= 'f') {
      v = ch - 'a' + 10;
    } else if (ch >= 'A' && ch <= 'F') {
      v = ch - 'A' + 10;
    } else {
      return absl::InvalidArgumentError("invalid hex digit");
    }
    for (int b = 3; b >= 0; --b) bits.push_back((v >> b) & 1);
  }
  bits.resize(length);
  return bits;
}

int GridBitWidth(int dim, const GridSpec& grid) {
  return dim * WidthFor(grid.MuValues().size()) +
         UpperEntries(dim) * WidthFor(grid.SigmaValues().size());
}

absl::StatusOr<CompressionScheme> GaussianGridScheme(int dim, size_t m,
                                                     const GridSpec& grid,
                                                     double robustness) {
  PPDL_RETURN_IF_ERROR(grid.Validate());
  if (dim < 1) return absl::InvalidArgumentError("dimension must be >= 1");
  if (m < static_cast<size_t>(dim) + 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "scheme forwards %d samples but a fit in dimension %d needs %d", m, dim,
        dim + 1));
  }
  if (!(robustness >= 0.0 && robustness <= 1.0)) {
    return absl::InvalidArgumentError("robustness must lie in [0, 1]");
  }
  CompressionScheme s;
  s.tau = static_cast<int>(m);
  s.bits = GridBitWidth(dim, grid);
  s.robustness = robustness;
  s.dim = dim;
  s.grid = grid;
  return s;
}

absl::StatusOr<GaussianParams> GaussianFit(const Dataset& data) {
  const int d = data.dim();
  if (data.size() < static_cast<size_t>(d) + 1) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "Gaussian fit in dimension %d needs at least %d samples, got %d", d,
        d + 1, data.size()));
  }
  const double n = static_cast<double>(data.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (size_t i = 0; i < data.size(); ++i) {
    const auto x = data.point(i);
    for (int j = 0; j < d; ++j) mean(j) += x[j];
  }
  mean /= n;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd diff(d);
  for (size_t i = 0; i < data.size(); ++i) {
    const auto x = data.point(i);
    for (int j = 0; j < d; ++j) diff(j) = x[j] - mean(j);
    cov.noalias() += diff * diff.transpose();
  }
  cov /= n;
  const double trace = cov.trace();
  if (!(trace > 0.0)) {
    return absl::FailedPreconditionError(
        "Gaussian fit failed: all samples are identical");
  }
  cov.diagonal().array() += 1e-9 * trace / d;
  auto fit = GaussianParams::Create(std::move(mean), std::move(cov));
  if (!fit.ok()) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "Gaussian fit is singular: %s", fit.status().message()));
  }
  return fit;
}

absl::StatusOr<CandidateSet> GaussianCandidateGrid(const Dataset& public_data,
                                                   const GridSpec& grid,
                                                   size_t cap) {
  PPDL_ASSIGN_OR_RETURN(const GaussianParams fit, GaussianFit(public_data));
  return EnumerateGrid(fit, grid, cap, public_data.size());
}

absl::StatusOr<CandidateSet> GaussianCandidateGridAround(
    const GaussianParams& anchor, const GridSpec& grid, size_t cap) {
  return EnumerateGrid(anchor, grid, cap, std::nullopt);
}

absl::StatusOr<EncodeResult> EncodeGaussian(const GaussianParams& target,
                                            const Dataset& public_data,
                                            const GridSpec& grid) {
  PPDL_RETURN_IF_ERROR(grid.Validate());
  PPDL_ASSIGN_OR_RETURN(const GaussianParams fit, GaussianFit(public_data));
  const int d = fit.dim();
  if (target.dim() != d) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "target dimension %d differs from data dimension %d", target.dim(), d));
  }
  PPDL_ASSIGN_OR_RETURN(
      const GridTables t,
      BuildTables(d, grid, std::numeric_limits<size_t>::max()));
  const Frame frame = MakeFrame(fit);

  EncodeResult out;
  // Mean: minimize |mean + S delta - target mean| over the grid.
  const Eigen::VectorXd target_offset = target.mean() - frame.mean;
  const std::vector<int>* best_mean = nullptr;
  double best_mean_dist = std::numeric_limits<double>::infinity();
  Eigen::VectorXd delta(d);
  for (const auto& mt : t.mean_tuples) {
    for (int i = 0; i < d; ++i) delta(i) = t.mu[mt[i]];
    const double dist = (frame.sqrt_cov * delta - target_offset).squaredNorm();
    if (dist < best_mean_dist) {
      best_mean_dist = dist;
      best_mean = &mt;
    }
  }
  // Covariance: minimize the Frobenius distance.
  const std::vector<int>* best_cov = nullptr;
  double best_cov_dist = std::numeric_limits<double>::infinity();
  for (const auto& ct : t.cov_tuples) {
    const Eigen::MatrixXd cov =
        frame.sqrt_cov * CorrectionMatrix(d, t.sigma, ct) * frame.sqrt_cov;
    const double dist = (cov - target.covariance()).squaredNorm();
    if (dist < best_cov_dist) {
      best_cov_dist = dist;
      best_cov = &ct;
    }
  }
  out.grid_indices = *best_mean;
  out.grid_indices.insert(out.grid_indices.end(), best_cov->begin(),
                          best_cov->end());

  // Clamping: the unconstrained optimum falls outside the grid by more than
  // half a step.
  const Eigen::VectorXd ideal_delta = frame.inv_sqrt_cov * target_offset;
  const double mu_lo = t.mu.front() - 0.5 * grid.mu_step;
  const double mu_hi = t.mu.back() + 0.5 * grid.mu_step;
  for (int i = 0; i < d; ++i) {
    if (ideal_delta(i) < mu_lo || ideal_delta(i) > mu_hi) out.clamped = true;
  }
  const Eigen::MatrixXd ideal_correction =
      frame.inv_sqrt_cov * target.covariance() * frame.inv_sqrt_cov -
      Eigen::MatrixXd::Identity(d, d);
  const double s_lo = t.sigma.front() - 0.5 * grid.sigma_step;
  const double s_hi = t.sigma.back() + 0.5 * grid.sigma_step;
  for (int r = 0; r < d; ++r) {
    for (int c = r; c < d; ++c) {
      const double v = ideal_correction(r, c);
      if (v < s_lo || v > s_hi) out.clamped = true;
    }
  }

  out.encoding.indices.resize(public_data.size());
  std::iota(out.encoding.indices.begin(), out.encoding.indices.end(),
            size_t{0});
  out.encoding.bits = PackBits(grid, d, out.grid_indices);
  return out;
}

absl::StatusOr<Distribution> Decode(const CompressionScheme& scheme,
                                    const Encoding& encoding,
                                    const Dataset& source) {
  if (scheme.decoder != kGaussianGridDecoder) {
    return absl::InvalidArgumentError(
        absl::StrFormat("unknown decoder '%s'", scheme.decoder));
  }
  if (static_cast<int>(encoding.bits.size()) != scheme.bits) {
    return absl::InvalidArgumentError(
        absl::StrFormat("malformed bitstring: length %d, scheme expects %d",
                        encoding.bits.size(), scheme.bits));
  }
  if (static_cast<int>(encoding.indices.size()) != scheme.tau) {
    return absl::InvalidArgumentError(
        absl::StrFormat("encoding forwards %d samples, scheme expects %d",
                        encoding.indices.size(), scheme.tau));
  }
  if (source.dim() != scheme.dim) {
    return absl::InvalidArgumentError("source dimension differs from scheme");
  }
  for (size_t idx : encoding.indices) {
    if (idx >= source.size()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("forwarded index %d outside a dataset of %d samples",
                          idx, source.size()));
    }
  }
  PPDL_ASSIGN_OR_RETURN(const GaussianParams fit,
                        GaussianFit(source.Subset(encoding.indices)));
  PPDL_ASSIGN_OR_RETURN(const std::vector<int> grid_indices,
                        UnpackBits(scheme.grid, scheme.dim, encoding.bits));
  GridTables t;
  t.dim = scheme.dim;
  t.mu = scheme.grid.MuValues();
  t.sigma = scheme.grid.SigmaValues();
  const std::span<const int> all(grid_indices);
  const auto mean_tuple = all.first(scheme.dim);
  const auto cov_tuple = all.subspan(scheme.dim);
  if (!IsPositiveDefinite(CorrectionMatrix(scheme.dim, t.sigma, cov_tuple))) {
    return absl::InvalidArgumentError(
        "encoding addresses a covariance correction that is not positive "
        "definite");
  }
  PPDL_ASSIGN_OR_RETURN(
      GaussianParams g,
      BuildCandidate(MakeFrame(fit), t, mean_tuple, cov_tuple));
  return Distribution(std::move(g));
}

std::vector<std::vector<double>> SimplexWeightGrid(int k, double step) {
  const int units =
      std::max(1, static_cast<int>(std::floor(1.0 / step + 1e-9)));
  std::vector<std::vector<double>> out;
  std::vector<int> counts(k, 0);
  // Recursive composition of `units` into k parts.
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == k - 1) {
      counts[pos] = remaining;
      std::vector<double> w(k);
      for (int i = 0; i < k; ++i) {
        w[i] = static_cast<double>(counts[i]) / units;
      }
      out.push_back(std::move(w));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[pos] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  rec(rec, 0, units);
  return out;
}

absl::StatusOr<CandidateSet> MixtureCandidates(
    std::span<const CandidateSet> per_component, double weight_step,
    size_t cap) {
  const int k = static_cast<int>(per_component.size());
  if (k < 1) return absl::InvalidArgumentError("mixture needs k >= 1");
  if (!(weight_step > 0.0 && weight_step <= 1.0)) {
    return absl::InvalidArgumentError("weight_step must lie in (0, 1]");
  }
  for (const auto& set : per_component) {
    if (set.size() == 0) {
      return absl::InvalidArgumentError("empty per-component candidate set");
    }
  }
  if (k == 1) return per_component.front();

  const auto weights = SimplexWeightGrid(k, weight_step);
  double total = static_cast<double>(weights.size());
  for (const auto& set : per_component)
    total *= static_cast<double>(set.size());
  if (total > static_cast<double>(cap)) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "candidate cap exceeded: mixture grid needs a cap of at least %.0f "
        "(cap %d)",
        total, cap));
  }
  std::vector<size_t> radix(k);
  for (int i = 0; i < k; ++i) radix[i] = per_component[i].size();
  CandidateSet out;
  out.hypotheses.reserve(static_cast<size_t>(total));
  out.provenance.reserve(static_cast<size_t>(total));
  std::vector<int> tuple(k, 0);
  do {
    std::vector<Distribution> components;
    components.reserve(k);
    for (int i = 0; i < k; ++i) {
      components.push_back(per_component[i].hypotheses[tuple[i]]);
    }
    for (size_t w = 0; w < weights.size(); ++w) {
      PPDL_ASSIGN_OR_RETURN(Distribution mix,
                            Distribution::Mixture(components, weights[w]));
      Provenance prov;
      prov.grid_indices = tuple;
      prov.grid_indices.push_back(static_cast<int>(w));
      out.hypotheses.push_back(std::move(mix));
      out.provenance.push_back(std::move(prov));
    }
  } while (NextTuple(tuple, radix));
  return out;
}

absl::StatusOr<CandidateSet> ProductCandidates(
    std::span<const CandidateSet> per_coordinate, size_t cap) {
  const int k = static_cast<int>(per_coordinate.size());
  if (k < 1) return absl::InvalidArgumentError("product needs k >= 1");
  double total = 1.0;
  std::vector<size_t> radix(k);
  for (int i = 0; i < k; ++i) {
    if (per_coordinate[i].size() == 0) {
      return absl::InvalidArgumentError("empty per-coordinate candidate set");
    }
    radix[i] = per_coordinate[i].size();
    total *= static_cast<double>(radix[i]);
  }
  if (total > static_cast<double>(cap)) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "candidate cap exceeded: product grid needs a cap of at least %.0f "
        "(cap %d)",
        total, cap));
  }
  CandidateSet out;
  std::vector<int> tuple(k, 0);
  do {
    std::vector<Distribution> factors;
    factors.reserve(k);
    for (int i = 0; i < k; ++i) {
      factors.push_back(per_coordinate[i].hypotheses[tuple[i]]);
    }
    PPDL_ASSIGN_OR_RETURN(Distribution prod,
                          Distribution::Product(std::move(factors)));
    out.hypotheses.push_back(std::move(prod));
    out.provenance.push_back(Provenance{tuple, std::nullopt});
  } while (NextTuple(tuple, radix));
  return out;
}

absl::StatusOr<ListIndexEncoding> CompressionFromListLearner(
    std::span<const Distribution> list, const Distribution& target,
    const TvOptions& options) {
  if (list.empty()) {
    return absl::InvalidArgumentError("list learner returned an empty list");
  }
  ListIndexEncoding out;
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < list.size(); ++i) {
    PPDL_ASSIGN_OR_RETURN(const TvEstimate tv,
                          TotalVariation(target, list[i], options));
    if (tv.value < best) {
      best = tv.value;
      out.index = i;
    }
  }
  out.bits = WidthFor(list.size());
  return out;
}

absl::StatusOr<double> PackingListSize(double epsilon, int n) {
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  if (n < 0) return absl::InvalidArgumentError("n must be nonnegative");
  return (10.0 / 9.0) * std::exp(epsilon * n);
}

}  // namespace ppdl
