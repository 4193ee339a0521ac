#include "subfw/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "subfw/matio.hpp"

namespace subfw {

namespace {

// Shared scalar kernels. The in-memory and chunk-backed least squares paths
// both run these exact loops, so their results agree bitwise.
double dot_n(const double* a, const double* b, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_n(double coef, const double* col, double* out, int n) {
  for (int i = 0; i < n; ++i) out[i] += coef * col[i];
}

double clip_gamma(double num, double den, double gamma_max) {
  if (den == 0.0) return 0.0;  // flat direction
  const double g = num / den;
  if (!(g > 0.0)) return 0.0;
  return std::min(g, gamma_max);
}

}  // namespace

double golden_section_minimize(const std::function<double(double)>& f,
                               double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  // Endpoints can win when the minimizer sits on the boundary.
  double best = mid, fbest = f(mid);
  if (f(0.0) < fbest) {
    best = 0.0;
    fbest = f(0.0);
  }
  if (f(hi) < fbest) best = hi;
  return best;
}

// ---------------------------------------------------------------------------
// quadratic

QuadraticObjective::QuadraticObjective(std::vector<double> center,
                                       std::vector<double> weights)
    : center_(std::move(center)), weights_(std::move(weights)) {
  if (weights_.empty()) weights_.assign(center_.size(), 1.0);
  if (weights_.size() != center_.size())
    throw ContractViolation("weights/center dimension mismatch");
  x_.assign(center_.size(), 0.0);
}

void QuadraticObjective::reset(const std::vector<double>& x0) {
  if (x0.size() != center_.size())
    throw ContractViolation("dimension mismatch");
  x_ = x0;
}

double QuadraticObjective::value() const { return value_at(x_); }

double QuadraticObjective::value_at(const std::vector<double>& x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < center_.size(); ++i) {
    const double r = x[i] - center_[i];
    acc += weights_[i] * r * r;
  }
  return 0.5 * acc;
}

std::vector<double> QuadraticObjective::partial_gradient(
    const std::vector<int>& coords) const {
  std::vector<double> out(coords.size());
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const auto i = static_cast<std::size_t>(coords[k]);
    if (i >= center_.size()) throw ContractViolation("coord out of range");
    out[k] = weights_[i] * (x_[i] - center_[i]);
  }
  return out;
}

std::vector<double> QuadraticObjective::full_gradient() const {
  std::vector<double> g(center_.size());
  for (std::size_t i = 0; i < center_.size(); ++i)
    g[i] = weights_[i] * (x_[i] - center_[i]);
  return g;
}

double QuadraticObjective::grad_dot_iterate() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < center_.size(); ++i)
    acc += weights_[i] * (x_[i] - center_[i]) * x_[i];
  return acc;
}

void QuadraticObjective::apply_step(const Atom& v, double scale_x,
                                    double coef_v) {
  for (double& xi : x_) xi *= scale_x;
  v.axpy(coef_v, x_);
}

double QuadraticObjective::line_search_toward(const Atom& v, bool away,
                                              double gamma_max) const {
  // d = +-(v - x); minimize 1/2 sum w (x + g d - c)^2 over g.
  double num = 0.0, den = 0.0;
  std::vector<double> vd(x_.size(), 0.0);
  v.axpy(1.0, vd);
  const double sign = away ? -1.0 : 1.0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double di = sign * (vd[i] - x_[i]);
    num -= weights_[i] * (x_[i] - center_[i]) * di;
    den += weights_[i] * di * di;
  }
  return clip_gamma(num, den, gamma_max);
}

double QuadraticObjective::line_search_dense(
    const std::vector<double>& direction, double gamma_max) const {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    num -= weights_[i] * (x_[i] - center_[i]) * direction[i];
    den += weights_[i] * direction[i] * direction[i];
  }
  return clip_gamma(num, den, gamma_max);
}

double QuadraticObjective::curvature_upper_bound(double domain_diameter) const {
  const double lip = *std::max_element(weights_.begin(), weights_.end());
  return domain_diameter * domain_diameter * lip;
}

// ---------------------------------------------------------------------------
// column sources

DenseColumns::DenseColumns(int rows, int cols, std::vector<double> column_major)
    : rows_(rows), cols_(cols), storage_(std::move(column_major)) {
  if (storage_.size() !=
      static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw ContractViolation("column-major payload size mismatch");
}

ChunkedFileColumns::ChunkedFileColumns(const std::string& path, int chunk_cols)
    : path_(path), chunk_cols_(chunk_cols) {
  if (chunk_cols < 1) throw ContractViolation("chunk_cols must be >= 1");
  const MatrixHeader h = read_matrix_header(path);
  rows_ = static_cast<int>(h.rows);
  cols_ = static_cast<int>(h.cols);
  in_.open(path, std::ios::binary);
  if (!in_)
    throw FileFormatError(FileFormatError::Kind::Io, "cannot open " + path);
  buffer_.resize(static_cast<std::size_t>(rows_) *
                 static_cast<std::size_t>(std::min(chunk_cols_, cols_)));
}

void ChunkedFileColumns::load_chunk(int chunk) const {
  const int first = chunk * chunk_cols_;
  const int count = std::min(chunk_cols_, cols_ - first);
  const std::streamoff offset =
      static_cast<std::streamoff>(kMatHeaderBytes) +
      static_cast<std::streamoff>(first) * rows_ * 8;
  in_.clear();
  in_.seekg(offset);
  if (!in_.read(reinterpret_cast<char*>(buffer_.data()),
                static_cast<std::streamsize>(static_cast<std::size_t>(count) *
                                             rows_ * sizeof(double))))
    throw FileFormatError(FileFormatError::Kind::Truncated,
                          "truncated payload in " + path_);
  current_chunk_ = chunk;
}

const double* ChunkedFileColumns::column(int j) const {
  const int chunk = j / chunk_cols_;
  if (chunk != current_chunk_) load_chunk(chunk);
  return buffer_.data() +
         static_cast<std::size_t>(j - chunk * chunk_cols_) * rows_;
}

// ---------------------------------------------------------------------------
// least squares

LeastSquaresObjective::LeastSquaresObjective(
    std::unique_ptr<ColumnSource> columns, std::vector<double> targets)
    : columns_(std::move(columns)), targets_(std::move(targets)) {
  if (static_cast<int>(targets_.size()) != columns_->rows())
    throw FileFormatError(FileFormatError::Kind::DimensionMismatch,
                          "target length does not match matrix rows");
  x_.assign(static_cast<std::size_t>(columns_->cols()), 0.0);
  residual_.resize(targets_.size());
  for (std::size_t i = 0; i < targets_.size(); ++i) residual_[i] = -targets_[i];
}

LeastSquaresObjective LeastSquaresObjective::from_dense(
    int rows, int cols, std::vector<double> column_major,
    std::vector<double> targets) {
  return LeastSquaresObjective(
      std::make_unique<DenseColumns>(rows, cols, std::move(column_major)),
      std::move(targets));
}

void LeastSquaresObjective::reset(const std::vector<double>& x0) {
  if (static_cast<int>(x0.size()) != dimension())
    throw ContractViolation("dimension mismatch");
  x_ = x0;
  residual_ = recompute_residual();
  steps_since_recompute_ = 0;
}

double LeastSquaresObjective::value() const {
  const int n = samples();
  return 0.5 * dot_n(residual_.data(), residual_.data(), n);
}

double LeastSquaresObjective::value_at(const std::vector<double>& x) const {
  const int n = samples();
  std::vector<double> r(targets_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = -targets_[i];
  for (int j = 0; j < dimension(); ++j) {
    const double xj = x[static_cast<std::size_t>(j)];
    if (xj != 0.0) axpy_n(xj, columns_->column(j), r.data(), n);
  }
  return 0.5 * dot_n(r.data(), r.data(), n);
}

std::vector<double> LeastSquaresObjective::partial_gradient(
    const std::vector<int>& coords) const {
  const int n = samples();
  std::vector<double> out(coords.size());
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const int j = coords[k];
    if (j < 0 || j >= dimension())
      throw ContractViolation("coord out of range");
    out[k] = dot_n(columns_->column(j), residual_.data(), n);
  }
  return out;
}

std::vector<double> LeastSquaresObjective::full_gradient() const {
  std::vector<int> coords(static_cast<std::size_t>(dimension()));
  for (int j = 0; j < dimension(); ++j) coords[static_cast<std::size_t>(j)] = j;
  return partial_gradient(coords);
}

double LeastSquaresObjective::grad_dot_iterate() const {
  // <X^T r, x> = <r, X x> = <r, r + y>
  const int n = samples();
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    acc += residual_[static_cast<std::size_t>(i)] *
           (residual_[static_cast<std::size_t>(i)] +
            targets_[static_cast<std::size_t>(i)]);
  return acc;
}

std::vector<double> LeastSquaresObjective::atom_image(const Atom& v) const {
  const int n = samples();
  std::vector<double> u(static_cast<std::size_t>(n), 0.0);
  for (const auto& [j, val] : v.entries())
    axpy_n(val, columns_->column(j), u.data(), n);
  return u;
}

void LeastSquaresObjective::apply_step(const Atom& v, double scale_x,
                                       double coef_v) {
  const std::vector<double> u = atom_image(v);
  const int n = samples();
  // x' = a x + c v  =>  r' = a r + c (X v - y) given a + c = 1.
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    residual_[k] = scale_x * residual_[k] + coef_v * (u[k] - targets_[k]);
  }
  for (double& xi : x_) xi *= scale_x;
  v.axpy(coef_v, x_);

  if (++steps_since_recompute_ >= kResidualRecomputeEvery) {
    residual_ = recompute_residual();
    steps_since_recompute_ = 0;
  }
}

double LeastSquaresObjective::line_search_toward(const Atom& v, bool away,
                                                 double gamma_max) const {
  const std::vector<double> u = atom_image(v);
  const int n = samples();
  // X d = +-(X v - y - r); gamma* = -<r, X d> / ||X d||^2 clipped.
  const double sign = away ? -1.0 : 1.0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double xd = sign * (u[k] - targets_[k] - residual_[k]);
    num -= residual_[k] * xd;
    den += xd * xd;
  }
  return clip_gamma(num, den, gamma_max);
}

double LeastSquaresObjective::line_search_dense(
    const std::vector<double>& direction, double gamma_max) const {
  const int n = samples();
  std::vector<double> xd(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < dimension(); ++j) {
    const double dj = direction[static_cast<std::size_t>(j)];
    if (dj != 0.0) axpy_n(dj, columns_->column(j), xd.data(), n);
  }
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    num -= residual_[k] * xd[k];
    den += xd[k] * xd[k];
  }
  return clip_gamma(num, den, gamma_max);
}

std::vector<double> LeastSquaresObjective::recompute_residual() const {
  const int n = samples();
  std::vector<double> r(targets_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = -targets_[i];
  for (int j = 0; j < dimension(); ++j) {
    const double xj = x_[static_cast<std::size_t>(j)];
    if (xj != 0.0) axpy_n(xj, columns_->column(j), r.data(), n);
  }
  return r;
}

double LeastSquaresObjective::lipschitz_bound() const {
  if (lipschitz_) return *lipschitz_;

  // Power iteration on X^T X, 100 rounds or relative change <= 1e-6,
  // inflated by 1%. An estimate, not an exact operator norm.
  const int n = samples(), d = dimension();
  std::vector<double> v(static_cast<std::size_t>(d),
                        1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<double> g(static_cast<std::size_t>(d));
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < d; ++j) {
      const double vj = v[static_cast<std::size_t>(j)];
      if (vj != 0.0) axpy_n(vj, columns_->column(j), w.data(), n);
    }
    const double new_lambda = dot_n(w.data(), w.data(), n);
    for (int j = 0; j < d; ++j)
      g[static_cast<std::size_t>(j)] = dot_n(columns_->column(j), w.data(), n);
    const double gn = std::sqrt(dot_n(g.data(), g.data(), d));
    if (gn == 0.0) {
      lambda = new_lambda;
      break;
    }
    for (int j = 0; j < d; ++j) v[static_cast<std::size_t>(j)] =
        g[static_cast<std::size_t>(j)] / gn;
    if (it > 0 && std::abs(new_lambda - lambda) <= 1e-6 * new_lambda) {
      lambda = new_lambda;
      break;
    }
    lambda = new_lambda;
  }
  lipschitz_ = lambda * 1.01;
  return *lipschitz_;
}

double LeastSquaresObjective::curvature_upper_bound(
    double domain_diameter) const {
  return domain_diameter * domain_diameter * lipschitz_bound();
}

LeastSquaresObjective read_chunked_matrix(const std::string& matrix_path,
                                          const std::string& target_path,
                                          int chunk_cols) {
  auto cols = std::make_unique<ChunkedFileColumns>(matrix_path, chunk_cols);
  std::vector<double> y = read_vector_file(target_path);
  return LeastSquaresObjective(std::move(cols), std::move(y));
}

}  // namespace subfw
