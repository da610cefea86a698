#include "flipspec/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "flipspec/errors.hpp"
#include "flipspec/fft.hpp"

namespace flipspec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDomainSlack = 1e-12;
constexpr double kPruneThreshold = 1e-14;

void check_levels(const CoefficientTable& table, const std::vector<int>& k) {
  if (k.size() != table.levels()) {
    throw ShapeError("coefficient offset has " + std::to_string(k.size()) +
                     " levels, table has " + std::to_string(table.levels()));
  }
}

void check_gamma(double gamma, const char* what) {
  if (!(gamma > 1.0 && gamma < 2.0)) {
    throw ParameterError(std::string(what) + " must lie in (1, 2), got " +
                         std::to_string(gamma));
  }
}

cdouble grunwald_value(double gamma, double theta) {
  // z = 1 + e^{i(theta + pi)} = 1 - e^{i theta}; Re z = 2 sin^2(theta/2) >= 0,
  // so the principal logarithm never meets its branch cut on [-pi, pi].
  const double s = std::sin(0.5 * theta);
  const cdouble z{2.0 * s * s, -std::sin(theta)};
  if (z == cdouble{}) return {};
  const cdouble power = std::exp(gamma * std::log(z));
  const cdouble prefactor =
      (2.0 - gamma * (1.0 - std::exp(cdouble{0.0, -theta}))) / 2.0;
  return -prefactor * power;
}

}  // namespace

// --- CoefficientTable ------------------------------------------------------

void CoefficientTable::add(std::vector<int> k, cdouble value) {
  check_levels(*this, k);
  entries_[std::move(k)] += value;
}

void CoefficientTable::set(std::vector<int> k, cdouble value) {
  check_levels(*this, k);
  entries_[std::move(k)] = value;
}

cdouble CoefficientTable::at(const std::vector<int>& k) const {
  auto it = entries_.find(k);
  return it == entries_.end() ? cdouble{} : it->second;
}

std::vector<int> CoefficientTable::band() const {
  std::vector<int> q(levels_, 0);
  for (const auto& [k, value] : entries_) {
    for (std::size_t l = 0; l < levels_; ++l) q[l] = std::max(q[l], std::abs(k[l]));
  }
  return q;
}

double CoefficientTable::max_abs() const {
  double m = 0.0;
  for (const auto& [k, value] : entries_) m = std::max(m, std::abs(value));
  return m;
}

bool CoefficientTable::is_real(double rel_tol) const {
  const double scale = std::max(max_abs(), 1e-300);
  return std::all_of(entries_.begin(), entries_.end(), [&](const auto& e) {
    return std::abs(e.second.imag()) <= rel_tol * scale;
  });
}

cdouble CoefficientTable::sum(std::span<const double> theta) const {
  cdouble total{};
  for (const auto& [k, value] : entries_) {
    double phase = 0.0;
    for (std::size_t l = 0; l < levels_; ++l) phase += k[l] * theta[l];
    total += value * cdouble{std::cos(phase), std::sin(phase)};
  }
  return total;
}

void CoefficientTable::prune(double rel_threshold) {
  const double cut = rel_threshold * max_abs();
  std::erase_if(entries_, [&](const auto& e) { return std::abs(e.second) <= cut; });
}

// --- Symbol ------------------------------------------------------------------

Symbol::Symbol(std::size_t levels, Evaluator closed_form,
               std::optional<CoefficientTable> coefficients, std::string name)
    : levels_(levels),
      closed_(std::move(closed_form)),
      coefficients_(std::move(coefficients)),
      name_(std::move(name)) {
  if (levels_ == 0) throw ParameterError("symbol needs at least one level");
  if (!closed_ && !coefficients_) {
    throw ParameterError("symbol '" + name_ +
                         "' needs a closed form or coefficients");
  }
  if (coefficients_ && coefficients_->levels() != levels_) {
    throw ShapeError("symbol '" + name_ + "' coefficient levels mismatch");
  }
}

Symbol Symbol::from_coefficients(CoefficientTable table, std::string name) {
  const std::size_t levels = table.levels();
  return Symbol(levels, {}, std::move(table), std::move(name));
}

const CoefficientTable& Symbol::coefficients() const {
  if (!coefficients_) {
    throw ParameterError("symbol '" + name_ + "' has no coefficient table");
  }
  return *coefficients_;
}

cdouble Symbol::evaluate(std::span<const double> theta) const {
  return closed_ ? closed_(theta) : coefficients_->sum(theta);
}

cdouble eval(const Symbol& symbol, std::span<const double> theta) {
  if (theta.size() != symbol.levels()) {
    throw ShapeError("symbol '" + symbol.name() + "' expects " +
                     std::to_string(symbol.levels()) + " angles");
  }
  for (double t : theta) {
    if (!(std::abs(t) <= kPi + kDomainSlack)) {
      throw DomainError("theta component " + std::to_string(t) +
                        " outside [-pi, pi]");
    }
  }
  return symbol.evaluate(theta);
}

CoefficientTable fourier_coefficients(const Evaluator& f,
                                      std::span<const int> band,
                                      std::span<const int> quadrature) {
  const std::size_t d = band.size();
  if (d == 0 || quadrature.size() != d) {
    throw ShapeError("band and quadrature must have the same positive length");
  }
  std::vector<std::size_t> shape(d);
  for (std::size_t l = 0; l < d; ++l) {
    if (band[l] < 0) throw ParameterError("band must be non-negative");
    if (quadrature[l] < 2 * band[l] + 1) {
      throw AliasingError("quadrature size " + std::to_string(quadrature[l]) +
                          " aliases band " + std::to_string(band[l]) +
                          " (needs >= " + std::to_string(2 * band[l] + 1) + ")");
    }
    shape[l] = static_cast<std::size_t>(quadrature[l]);
  }

  FftNd fft(shape);
  std::vector<cdouble> samples(fft.total());
  std::vector<double> theta(d);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t flat = 0; flat < samples.size(); ++flat) {
    for (std::size_t l = 0; l < d; ++l) {
      const double m = static_cast<double>(shape[l]);
      double t = 2.0 * kPi * static_cast<double>(idx[l]) / m;
      if (t > kPi) t -= 2.0 * kPi;
      theta[l] = t;
    }
    samples[flat] = f(theta);
    for (std::size_t l = d; l-- > 0;) {
      if (++idx[l] < shape[l]) break;
      idx[l] = 0;
    }
  }
  fft.forward(samples);

  const double scale = 1.0 / static_cast<double>(fft.total());
  CoefficientTable table(d);
  std::vector<int> k(d);
  std::vector<int> lo(d), hi(d);
  for (std::size_t l = 0; l < d; ++l) {
    lo[l] = -band[l];
    hi[l] = band[l];
  }
  k = lo;
  while (true) {
    std::size_t flat = 0;
    for (std::size_t l = 0; l < d; ++l) {
      const int m = quadrature[l];
      flat = flat * shape[l] + static_cast<std::size_t>(((k[l] % m) + m) % m);
    }
    const cdouble value = samples[flat] * scale;
    if (value != cdouble{}) table.set(k, value);
    std::size_t l = d;
    while (l-- > 0) {
      if (++k[l] <= hi[l]) break;
      k[l] = lo[l];
    }
    if (l == static_cast<std::size_t>(-1)) break;
  }
  table.prune(kPruneThreshold);
  return table;
}

CoefficientTable fourier_coefficients(const Symbol& symbol,
                                      std::span<const int> band,
                                      std::span<const int> quadrature) {
  if (band.size() != symbol.levels()) {
    throw ShapeError("band length does not match symbol levels");
  }
  return fourier_coefficients(
      [&symbol](std::span<const double> theta) { return symbol.evaluate(theta); },
      band, quadrature);
}

// --- built-ins -------------------------------------------------------------

Symbol constant_symbol(double value, std::size_t levels) {
  CoefficientTable table(levels);
  table.set(std::vector<int>(levels, 0), value);
  return Symbol(
      levels, [value](std::span<const double>) { return cdouble{value, 0.0}; },
      std::move(table), "constant");
}

Symbol laplace1d_symbol() {
  CoefficientTable table(1);
  table.set({0}, 2.0);
  table.set({1}, -1.0);
  table.set({-1}, -1.0);
  return Symbol(
      1,
      [](std::span<const double> t) { return cdouble{2.0 - 2.0 * std::cos(t[0]), 0.0}; },
      std::move(table), "laplace1d");
}

Symbol trig_monomial(std::vector<int> k, double coefficient) {
  const std::size_t levels = k.size();
  CoefficientTable table(levels);
  table.set(k, coefficient);
  return Symbol(
      levels,
      [k, coefficient](std::span<const double> t) {
        double phase = 0.0;
        for (std::size_t l = 0; l < k.size(); ++l) phase += k[l] * t[l];
        return coefficient * cdouble{std::cos(phase), std::sin(phase)};
      },
      std::move(table), "monomial");
}

Symbol ex1_symbol() {
  CoefficientTable table(2);
  table.set({0, 0}, 4.0);
  table.set({1, 0}, 1.0);
  table.set({0, 1}, 1.0);
  return Symbol(
      2,
      [](std::span<const double> t) {
        return 4.0 + std::exp(cdouble{0.0, t[0]}) + std::exp(cdouble{0.0, t[1]});
      },
      std::move(table), "ex1");
}

CoefficientTable grunwald_coefficients(double gamma, int band) {
  check_gamma(gamma, "gamma");
  if (band < 0) throw ParameterError("band must be non-negative");
  const int m = std::max(kFractionalQuadrature,
                         static_cast<int>(next_power_of_two(8 * (2 * band + 1))));
  const int q[] = {std::max(band, 1)};
  const int quad[] = {m};
  const CoefficientTable raw = fourier_coefficients(
      [gamma](std::span<const double> t) { return grunwald_value(gamma, t[0]); },
      q, quad);
  // f_gamma(-theta) = conj(f_gamma(theta)), so the exact coefficients are real
  // and vanish for k < -1; what remains there is aliasing round-off.
  CoefficientTable table(1);
  for (int k = -1; k <= band; ++k) {
    const double value = raw.at({k}).real();
    if (value != 0.0) table.set({k}, value);
  }
  return table;
}

Symbol grunwald_symbol(double gamma, int band) {
  check_gamma(gamma, "gamma");
  std::optional<CoefficientTable> table;
  if (band >= 0) table = grunwald_coefficients(gamma, band);
  return Symbol(
      1, [gamma](std::span<const double> t) { return grunwald_value(gamma, t[0]); },
      std::move(table), "grunwald");
}

double FractionalParams::coupling() const {
  return std::pow(hx(), alpha) / std::pow(hy(), beta);
}

double FractionalParams::identity_shift() const {
  return shift ? 2.0 * std::pow(hx(), alpha) / dt() : 0.0;
}

void FractionalParams::validate() const {
  check_gamma(alpha, "alpha");
  check_gamma(beta, "beta");
  if (n1 < 1 || n2 < 1) throw ParameterError("n1, n2 must be >= 1");
  if (M < 0) throw ParameterError("M must be >= 0 (0 selects M = n1)");
}

Symbol fractional_symbol(const FractionalParams& params) {
  params.validate();
  const double ratio = params.coupling();
  const double shift = params.identity_shift();
  const Symbol fa = grunwald_symbol(params.alpha, params.n1 - 1);
  const Symbol fb = grunwald_symbol(params.beta, params.n2 - 1);
  return linear_combination(
      {{1.0, lift_to_level(fa, 0, 2)}, {ratio, lift_to_level(fb, 1, 2)}},
      shift, "frac");
}

ConvectionDiffusionStencil convection_diffusion_stencil(int n1, int n2, int n3) {
  if (n1 < 1 || n2 < 1 || n3 < 1) {
    throw ParameterError("convection-diffusion sizes must be >= 1");
  }
  const double hx = 1.0 / (n1 + 1);
  const double hy = 1.0 / (n2 + 1);
  const double hz = 1.0 / (n3 + 1);
  return {6.0 + 2.0 * hx + hy + 1.5 * hz,
          -1.0 - 2.0 * hx,
          -1.0,
          -1.0 - hy,
          -1.0,
          -1.0 - 1.5 * hz,
          -1.0};
}

std::array<Symbol, 3> convection_diffusion_level_symbols(int n1, int n2,
                                                         int n3) {
  const auto s = convection_diffusion_stencil(n1, n2, n3);
  auto three_point = [](double center, double lower, double upper,
                        std::string name) {
    CoefficientTable table(1);
    if (center != 0.0) table.set({0}, center);
    table.set({1}, lower);
    table.set({-1}, upper);
    return Symbol(
        1,
        [center, lower, upper](std::span<const double> t) {
          return center + lower * std::exp(cdouble{0.0, t[0]}) +
                 upper * std::exp(cdouble{0.0, -t[0]});
        },
        std::move(table), std::move(name));
  };
  return {three_point(s.a, s.b, s.c, "convdiff_f1"),
          three_point(0.0, s.d, s.e, "convdiff_f2"),
          three_point(0.0, s.f, s.g, "convdiff_f3")};
}

Symbol convection_diffusion_symbol(int n1, int n2, int n3) {
  auto parts = convection_diffusion_level_symbols(n1, n2, n3);
  return linear_combination({{1.0, lift_to_level(parts[0], 0, 3)},
                             {1.0, lift_to_level(parts[1], 1, 3)},
                             {1.0, lift_to_level(parts[2], 2, 3)}},
                            0.0, "convdiff");
}

Symbol real_part_symbol(const Symbol& f) {
  std::optional<CoefficientTable> table;
  if (f.has_coefficients()) {
    const CoefficientTable& src = f.coefficients();
    CoefficientTable out(src.levels());
    for (const auto& [k, value] : src.entries()) {
      std::vector<int> minus_k(k.size());
      std::transform(k.begin(), k.end(), minus_k.begin(), std::negate<>());
      out.add(k, 0.5 * value);
      out.add(minus_k, 0.5 * std::conj(value));
    }
    table = std::move(out);
  }
  Evaluator closed;
  if (f.has_closed_form()) {
    closed = [g = f.closed_form()](std::span<const double> t) {
      return cdouble{g(t).real(), 0.0};
    };
  }
  return Symbol(f.levels(), std::move(closed), std::move(table),
                f.name() + "_R");
}

Symbol p_beta_truncation(double beta) {
  const CoefficientTable full = grunwald_coefficients(beta, 2);
  return Symbol::from_coefficients(full, "p_beta");
}

Symbol lift_to_level(const Symbol& unilevel, std::size_t level,
                     std::size_t levels) {
  if (unilevel.levels() != 1) throw ShapeError("lift_to_level needs a unilevel symbol");
  if (level >= levels) throw ShapeError("target level out of range");
  std::optional<CoefficientTable> table;
  if (unilevel.has_coefficients()) {
    CoefficientTable out(levels);
    for (const auto& [k, value] : unilevel.coefficients().entries()) {
      std::vector<int> kk(levels, 0);
      kk[level] = k[0];
      out.set(std::move(kk), value);
    }
    table = std::move(out);
  }
  Evaluator closed = [f = unilevel, level](std::span<const double> t) {
    const double one[] = {t[level]};
    return f.evaluate(one);
  };
  return Symbol(levels, std::move(closed), std::move(table), unilevel.name());
}

Symbol linear_combination(const std::vector<std::pair<double, Symbol>>& terms,
                          double shift, std::string name) {
  if (terms.empty()) throw ParameterError("linear_combination needs terms");
  const std::size_t levels = terms.front().second.levels();
  bool all_coefficients = true;
  for (const auto& [w, s] : terms) {
    if (s.levels() != levels) throw ShapeError("linear_combination level mismatch");
    all_coefficients = all_coefficients && s.has_coefficients();
  }
  std::optional<CoefficientTable> table;
  if (all_coefficients) {
    CoefficientTable out(levels);
    for (const auto& [w, s] : terms) {
      for (const auto& [k, value] : s.coefficients().entries()) out.add(k, w * value);
    }
    if (shift != 0.0) out.add(std::vector<int>(levels, 0), shift);
    table = std::move(out);
  }
  Evaluator closed = [terms, shift](std::span<const double> t) {
    cdouble total{shift, 0.0};
    for (const auto& [w, s] : terms) total += w * s.evaluate(t);
    return total;
  };
  return Symbol(levels, std::move(closed), std::move(table), std::move(name));
}

std::array<std::array<cdouble, 2>, 2> BlockSymbol2x2::evaluate(
    std::span<const double> theta) const {
  const cdouble v = eval(f_, theta);
  return {{{cdouble{}, v}, {std::conj(v), cdouble{}}}};
}

std::array<double, 2> BlockSymbol2x2::eigenvalues(
    std::span<const double> theta) const {
  const double a = std::abs(eval(f_, theta));
  return {-a, a};
}

void write_coefficients_csv(std::ostream& out, const CoefficientTable& table) {
  out << std::setprecision(17);
  for (const auto& [k, value] : table.entries()) {
    for (int kl : k) out << kl << ',';
    out << value.real() << ',' << value.imag() << '\n';
  }
}

}  // namespace flipspec
