#include "uamdp/gp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace uamdp {

namespace {

constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;

}  // namespace

GaussianProcess::GaussianProcess(GPModel model, Exec exec) : model_(std::move(model)), exec_(exec) {
  const auto n = model_.inputs.rows();
  const auto p = model_.inputs.cols();
  const std::size_t d = model_.noise_variance.size();
  if (d == 0) throw std::invalid_argument("GP needs at least one output");
  if (model_.targets.rows() != n) throw std::invalid_argument("GP inputs/targets row mismatch");
  if (n > 0 && static_cast<std::size_t>(model_.targets.cols()) != d)
    throw std::invalid_argument("GP targets/noise dimension mismatch");
  if (model_.mean.empty()) model_.mean.assign(d, 0.0);
  if (model_.mean.size() != d) throw std::invalid_argument("GP mean dimension mismatch");
  if (model_.kernel.length_scales.size() != static_cast<std::size_t>(p))
    throw std::invalid_argument("GP length-scale count must equal input dimension");
  for (double l : model_.kernel.length_scales)
    if (!(l > 0.0)) throw std::invalid_argument("GP length-scales must be positive");
  for (double s : model_.noise_variance)
    if (!(s > 0.0)) throw std::invalid_argument("GP noise variance must be positive");
  if (!(model_.kernel.signal_variance > 0.0))
    throw std::invalid_argument("GP signal variance must be positive");

  const auto nn = static_cast<std::size_t>(n);
  const auto pp = static_cast<std::size_t>(p);
  row_major_inputs_.resize(nn * pp);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t k = 0; k < pp; ++k) row_major_inputs_[i * pp + k] = model_.inputs(i, k);

  std::vector<double> gram(nn * nn);
  kernels::se_gram(row_major_inputs_, nn, pp, model_.kernel.length_scales,
                   model_.kernel.signal_variance, gram, exec_);
  const Eigen::MatrixXd k_base =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          gram.data(), n, n);

  const double sf2 = model_.kernel.signal_variance;
  for (std::size_t j = 0; j < d; ++j) {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = kJitterStart * sf2;
    bool ok = false;
    while (jitter <= kJitterMax * sf2 * (1.0 + 1e-12)) {
      Eigen::MatrixXd k = k_base;
      k.diagonal().array() += model_.noise_variance[j] + jitter;
      llt.compute(k);
      if (llt.info() == Eigen::Success) {
        ok = true;
        break;
      }
      jitter *= 10.0;
    }
    if (!ok) throw IllConditioned("Gram matrix factorization failed after jitter escalation");
    Eigen::VectorXd centered = n > 0 ? Eigen::VectorXd(model_.targets.col(j).array() - model_.mean[j])
                                     : Eigen::VectorXd();
    alpha_.push_back(n > 0 ? Eigen::VectorXd(llt.solve(centered)) : Eigen::VectorXd());
    chol_.push_back(std::move(llt));
    jitter_.push_back(jitter);
  }
}

PredictiveDist GaussianProcess::predict(std::span<const double> z) const {
  const std::size_t p = input_dim();
  if (z.size() != p) throw std::invalid_argument("gp_predict: query dimension mismatch");
  const std::size_t n = train_size();
  const std::size_t d = output_dim();
  const double sf2 = model_.kernel.signal_variance;

  std::vector<double> means(d), vars(d);
  if (n == 0) {
    for (std::size_t j = 0; j < d; ++j) {
      means[j] = model_.mean[j];
      vars[j] = sf2 + model_.noise_variance[j];
    }
    return PredictiveDist::gaussian(std::move(means), std::move(vars));
  }

  std::vector<double> cross(n);
  kernels::se_cross(z, 1, row_major_inputs_, n, p, model_.kernel.length_scales, sf2, cross,
                    Exec::serial);
  const Eigen::Map<const Eigen::VectorXd> kstar(cross.data(), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < d; ++j) {
    means[j] = model_.mean[j] + kstar.dot(alpha_[j]);
    const Eigen::VectorXd v = chol_[j].matrixL().solve(kstar);
    const double latent = std::max(sf2 - v.squaredNorm(), 0.0);
    vars[j] = latent + model_.noise_variance[j];
  }
  return PredictiveDist::gaussian(std::move(means), std::move(vars));
}

TrainingTable load_training_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open training table: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty training table: " + path);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell.erase(std::remove_if(cell.begin(), cell.end(), ::isspace), cell.end());
      header.push_back(cell);
    }
  }
  std::vector<std::size_t> zcols, ycols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].rfind("z_", 0) == 0) zcols.push_back(c);
    else if (header[c].rfind("y_", 0) == 0) ycols.push_back(c);
    else throw std::runtime_error("training table: unexpected column '" + header[c] + "'");
  }
  if (ycols.empty()) throw std::runtime_error("training table has no y_ columns");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != header.size())
      throw std::runtime_error("training table: row width mismatch in " + path);
    rows.push_back(std::move(row));
  }
  TrainingTable t;
  const auto n = static_cast<Eigen::Index>(rows.size());
  t.inputs.resize(n, static_cast<Eigen::Index>(zcols.size()));
  t.targets.resize(n, static_cast<Eigen::Index>(ycols.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < zcols.size(); ++k) t.inputs(i, k) = rows[i][zcols[k]];
    for (std::size_t k = 0; k < ycols.size(); ++k) t.targets(i, k) = rows[i][ycols[k]];
  }
  return t;
}

void save_training_csv(const std::string& path, const TrainingTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write training table: " + path);
  out.precision(17);
  for (Eigen::Index k = 0; k < table.inputs.cols(); ++k) out << (k ? "," : "") << "z_" << k + 1;
  for (Eigen::Index k = 0; k < table.targets.cols(); ++k) out << ",y_" << k + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < table.inputs.rows(); ++i) {
    for (Eigen::Index k = 0; k < table.inputs.cols(); ++k) out << (k ? "," : "") << table.inputs(i, k);
    for (Eigen::Index k = 0; k < table.targets.cols(); ++k) out << ',' << table.targets(i, k);
    out << '\n';
  }
}

std::vector<double> one_hot(std::size_t index, std::size_t size) {
  if (index >= size) throw std::out_of_range("one_hot: index out of range");
  std::vector<double> v(size, 0.0);
  v[index] = 1.0;
  return v;
}

GpForecaster::GpForecaster(GaussianProcess gp, std::vector<LatentParam> support)
    : gp_(std::move(gp)), support_(std::move(support)) {
  if (support_.empty()) throw std::invalid_argument("GP forecaster needs a theta support");
}

PredictiveDist GpForecaster::predict(const ForecastInput& in, const LatentParam& theta) const {
  std::size_t pos = support_.size();
  for (std::size_t i = 0; i < support_.size(); ++i)
    if (support_[i].id == theta.id) pos = i;
  if (pos == support_.size()) throw std::invalid_argument("GP forecaster: theta not in support: " + theta.id);
  std::vector<double> z(in.features.begin(), in.features.end());
  const auto code = one_hot(pos, support_.size());
  z.insert(z.end(), code.begin(), code.end());
  return gp_.predict(z);
}

}  // namespace uamdp
