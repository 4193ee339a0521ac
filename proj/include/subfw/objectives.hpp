#ifndef SUBFW_OBJECTIVES_HPP
#define SUBFW_OBJECTIVES_HPP

#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "subfw/atom.hpp"

namespace subfw {

// Stateful objective bound to one solver run: it tracks the current iterate
// so values, gradients and line searches reuse maintained quantities. Steps
// have the affine form x <- a x + c v with a + c = 1.
class ObjectiveModel {
 public:
  virtual ~ObjectiveModel() = default;

  virtual int dimension() const = 0;
  virtual void reset(const std::vector<double>& x0) = 0;
  virtual const std::vector<double>& current_x() const = 0;

  virtual double value() const = 0;
  virtual double value_at(const std::vector<double>& x) const = 0;

  // Gradient coordinates at the current iterate, aligned with `coords`
  // (ascending, unique). Touches only the matching matrix columns.
  virtual std::vector<double> partial_gradient(
      const std::vector<int>& coords) const = 0;
  virtual std::vector<double> full_gradient() const = 0;

  // <grad f(x), x> at the current iterate, computed from maintained state
  // without gradient-coordinate evaluations.
  virtual double grad_dot_iterate() const = 0;

  virtual void apply_step(const Atom& v, double scale_x, double coef_v) = 0;

  // argmin over [0, gamma_max] of f(x + gamma d) with d = v - x
  // (away = false) or d = x - v (away = true). Flat directions return 0.
  virtual double line_search_toward(const Atom& v, bool away,
                                    double gamma_max) const = 0;
  // Same minimization along an arbitrary dense direction.
  virtual double line_search_dense(const std::vector<double>& direction,
                                   double gamma_max) const = 0;

  virtual double curvature_upper_bound(double domain_diameter) const = 0;
};

// Golden-section minimization of a unimodal function on [0, hi] to the
// given interval width; reference oracle for the closed-form searches.
double golden_section_minimize(const std::function<double(double)>& f,
                               double hi, double tol = 1e-10);

// f(x) = 1/2 sum_i w_i (x_i - c_i)^2, diagonal weights defaulting to one.
// The unconstrained minimizer is the center, f(c) = 0.
class QuadraticObjective : public ObjectiveModel {
 public:
  explicit QuadraticObjective(std::vector<double> center,
                              std::vector<double> weights = {});

  int dimension() const override { return static_cast<int>(center_.size()); }
  void reset(const std::vector<double>& x0) override;
  const std::vector<double>& current_x() const override { return x_; }
  double value() const override;
  double value_at(const std::vector<double>& x) const override;
  std::vector<double> partial_gradient(
      const std::vector<int>& coords) const override;
  std::vector<double> full_gradient() const override;
  double grad_dot_iterate() const override;
  void apply_step(const Atom& v, double scale_x, double coef_v) override;
  double line_search_toward(const Atom& v, bool away,
                            double gamma_max) const override;
  double line_search_dense(const std::vector<double>& direction,
                           double gamma_max) const override;
  double curvature_upper_bound(double domain_diameter) const override;

  const std::vector<double>& center() const { return center_; }

 private:
  std::vector<double> center_;
  std::vector<double> weights_;
  std::vector<double> x_;
};

// Column access to a design matrix; the chunked variant never holds more
// than rows x chunk_cols values in memory.
class ColumnSource {
 public:
  virtual ~ColumnSource() = default;
  virtual int rows() const = 0;
  virtual int cols() const = 0;
  // Pointer valid until the next call on the same source.
  virtual const double* column(int j) const = 0;
};

class DenseColumns : public ColumnSource {
 public:
  DenseColumns(int rows, int cols, std::vector<double> column_major);
  int rows() const override { return rows_; }
  int cols() const override { return cols_; }
  const double* column(int j) const override {
    return storage_.data() + static_cast<std::size_t>(j) * rows_;
  }
  const std::vector<double>& storage() const { return storage_; }

 private:
  int rows_, cols_;
  std::vector<double> storage_;
};

class ChunkedFileColumns : public ColumnSource {
 public:
  ChunkedFileColumns(const std::string& path, int chunk_cols);
  int rows() const override { return rows_; }
  int cols() const override { return cols_; }
  const double* column(int j) const override;
  int chunk_cols() const { return chunk_cols_; }

 private:
  void load_chunk(int chunk) const;

  std::string path_;
  int rows_ = 0, cols_ = 0, chunk_cols_ = 0;
  mutable std::ifstream in_;
  mutable std::vector<double> buffer_;
  mutable int current_chunk_ = -1;
};

// f(x) = 1/2 ||X x - y||^2 with the residual r = X x - y maintained
// incrementally; a full recompute every 1000 steps bounds drift.
class LeastSquaresObjective : public ObjectiveModel {
 public:
  static constexpr int kResidualRecomputeEvery = 1000;

  LeastSquaresObjective(std::unique_ptr<ColumnSource> columns,
                        std::vector<double> targets);

  static LeastSquaresObjective from_dense(int rows, int cols,
                                          std::vector<double> column_major,
                                          std::vector<double> targets);

  int dimension() const override { return columns_->cols(); }
  int samples() const { return columns_->rows(); }
  void reset(const std::vector<double>& x0) override;
  const std::vector<double>& current_x() const override { return x_; }
  double value() const override;
  double value_at(const std::vector<double>& x) const override;
  std::vector<double> partial_gradient(
      const std::vector<int>& coords) const override;
  std::vector<double> full_gradient() const override;
  double grad_dot_iterate() const override;
  void apply_step(const Atom& v, double scale_x, double coef_v) override;
  double line_search_toward(const Atom& v, bool away,
                            double gamma_max) const override;
  double line_search_dense(const std::vector<double>& direction,
                           double gamma_max) const override;
  double curvature_upper_bound(double domain_diameter) const override;

  const std::vector<double>& residual() const { return residual_; }
  const std::vector<double>& targets() const { return targets_; }
  const ColumnSource& columns() const { return *columns_; }
  std::vector<double> recompute_residual() const;
  // Power-iteration estimate of ||X||_2^2 inflated by 1%; cached.
  double lipschitz_bound() const;

 private:
  std::vector<double> atom_image(const Atom& v) const;  // X v

  std::unique_ptr<ColumnSource> columns_;
  std::vector<double> targets_;
  std::vector<double> x_;
  std::vector<double> residual_;
  long steps_since_recompute_ = 0;
  mutable std::optional<double> lipschitz_;
};

// Chunk-backed least squares over an FWMAT1/FWVEC1 pair.
LeastSquaresObjective read_chunked_matrix(const std::string& matrix_path,
                                          const std::string& target_path,
                                          int chunk_cols);

}  // namespace subfw

#endif
