#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sada/matrix.hpp"

namespace sada {

enum class MlpMode : std::uint8_t { Train, Eval };

// Intermediates of one train-mode forward pass, consumed by backward().
struct MlpForwardCache {
  std::vector<Matrix> z;     // per hidden layer: linear output before batch norm
  std::vector<Matrix> xhat;  // per hidden layer: normalized pre-activations
  std::vector<Matrix> act;   // per hidden layer: post-ReLU activations
  std::vector<std::vector<double>> mu, var, inv_std;
  std::vector<double> z_out;  // final linear output
  std::vector<double> pred;
};

// Behavior head on frozen representations: hidden layers of
// linear -> batch norm -> ReLU, then linear -> tanh scaled by d_max, so
// predictions always land in (-d_max, d_max) meters. A dims list without
// hidden layers ([D, 1]) is the linear predictor; it carries no batch norm.
class MlpModel {
 public:
  // He-normal weights, zero biases, gamma 1 / beta 0, running stats (0, 1).
  static MlpModel init(const std::vector<std::size_t>& dims, std::uint64_t seed,
                       double d_max = 1.0);

  const std::vector<std::size_t>& dims() const { return dims_; }
  double d_max() const { return d_max_; }
  std::size_t n_hidden() const { return dims_.size() - 2; }

  // Trainable parameters, flat: per layer W (row-major out x in) then b,
  // followed by gamma then beta for hidden layers.
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t n_params() const { return params_.size(); }

  std::span<const double> running_mean(std::size_t hidden) const { return run_mean_[hidden]; }
  std::span<const double> running_var(std::size_t hidden) const { return run_var_[hidden]; }

  // Train mode normalizes with batch statistics and updates the running
  // stats; eval mode uses running stats and never mutates the model.
  std::vector<double> forward(const Matrix& x, MlpMode mode);
  std::vector<double> forward_eval(const Matrix& x) const;

  // Forward with cached intermediates (train mode).
  void forward_train(const Matrix& x, MlpForwardCache& cache, bool update_running = true);

  // Exact gradient of loss_scale * MSE through the cached pass; returns the
  // loss. grads must have n_params() entries.
  double backward(const Matrix& x, std::span<const double> target, const MlpForwardCache& cache,
                  std::span<double> grads, double loss_scale = 1.0) const;

  // Convenience: train-mode forward + backward.
  double loss_and_gradients(const Matrix& x, std::span<const double> target,
                            std::span<double> grads, double loss_scale = 1.0);

  void save(const std::string& path) const;
  static MlpModel load(const std::string& path);

  static constexpr double kBnMomentum = 0.1;
  static constexpr double kBnEps = 1e-5;

 private:
  void check_input(const Matrix& x, MlpMode mode) const;

  std::span<double> weight(std::size_t layer);
  std::span<const double> weight(std::size_t layer) const;
  std::span<double> bias(std::size_t layer);
  std::span<const double> bias(std::size_t layer) const;
  std::span<double> gamma(std::size_t hidden);
  std::span<const double> gamma(std::size_t hidden) const;
  std::span<double> beta(std::size_t hidden);
  std::span<const double> beta(std::size_t hidden) const;

  std::vector<std::size_t> dims_;
  std::vector<double> params_;
  std::vector<std::size_t> w_off_, b_off_, g_off_, be_off_;
  std::vector<std::vector<double>> run_mean_, run_var_;
  double d_max_ = 1.0;
};

// (1/N) * sum of squared prediction errors.
double mlp_loss(std::span<const double> pred, std::span<const double> target);

struct CosineSchedule {
  double lr_max = 1e-3;
  double lr_min = 0.0;
  std::size_t total_steps = 1;

  // lr_min + (lr_max - lr_min) * (1 + cos(pi * step / total)) / 2,
  // clamped to lr_min past the end.
  double at(std::size_t step) const;
};

// Decoupled weight decay: p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + wd * p)
class AdamW {
 public:
  struct Config {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
  };

  explicit AdamW(std::size_t n_params, Config cfg = {});

  void step(std::span<double> params, std::span<const double> grads, double lr);
  std::uint64_t step_count() const { return t_; }

 private:
  Config cfg_;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

struct MlpTrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 256;
  double lr_max = 1e-3;
  double lr_min = 0.0;
  double weight_decay = 0.01;
  std::uint64_t seed = 0;
};

struct MlpTrainHistory {
  std::vector<double> train_loss;  // per epoch, mean over batches
  std::vector<double> val_loss;    // per epoch when validation data is given
  std::size_t clipped_targets = 0;
};

// Seeded shuffle each epoch, AdamW with a cosine schedule over all steps,
// final batch dropped when it would have a single sample. Targets are
// clipped just inside (-d_max, d_max); it is an error if none survive.
MlpTrainHistory train_mlp(MlpModel& m, const Matrix& x, std::span<const double> y,
                          const MlpTrainConfig& cfg, const Matrix* x_val = nullptr,
                          std::span<const double> y_val = {});

}  // namespace sada
