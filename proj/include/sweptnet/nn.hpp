#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sweptnet/dataset.hpp"

namespace sweptnet {

// Fully connected residual network predicting the signed distance of a
// task-space point to the swept volume of a motion. Input row layout is
// [x (3), q0 (dof), q1 (dof)]. Each block computes
//   h_i = BatchNorm(ReLU(Linear(concat(h_{i-1}, z)))) + h_{i-1}
// where z is the normalized network input, fed to every block.
template <class S>
struct MlpT {
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Wmat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;  // [out x in], column-major
    using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

    struct Block {
        Wmat weight;  // [block_dim x (block_dim + input_dim)]
        Vec bias;
        Vec gamma, beta;
        Vec running_mean, running_var;
    };

    int n_blocks = 0;
    int block_dim = 0;
    int input_dim = 0;

    Vec norm_shift, norm_scale;  // z = (raw - shift) .* scale
    Wmat input_weight;           // [block_dim x input_dim]
    Vec input_bias;
    std::vector<Block> blocks;
    Vec output_weight;  // [block_dim]
    S output_bias = 0;

    int dof() const { return (input_dim - 3) / 2; }
    long param_count() const;  // trainable parameters only
};

using Mlp = MlpT<float>;

enum class Mode { Train, Eval };

template <class S>
struct ForwardCacheT {
    using Mat = typename MlpT<S>::Mat;
    using Vec = typename MlpT<S>::Vec;
    Mat z;                        // normalized input
    std::vector<Mat> h;           // hidden states h_0 .. h_{n_b}
    std::vector<Mat> concat;      // per block, [h_{i-1}, z]
    std::vector<Mat> pre_relu;    // per block
    std::vector<Mat> xhat;        // per block, post-ReLU normalized by batch stats
    std::vector<Vec> inv_std;     // per block
    Vec pred;
};

template <class S>
struct GradsT {
    using Wmat = typename MlpT<S>::Wmat;
    using Vec = typename MlpT<S>::Vec;
    struct Block {
        Wmat weight;
        Vec bias, gamma, beta;
    };
    Wmat input_weight;
    Vec input_bias;
    std::vector<Block> blocks;
    Vec output_weight;
    S output_bias = 0;

    static GradsT zeros_like(const MlpT<S>& m);
    void set_zero();
};

// Weights uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)), biases zero, batchnorm
// gamma=1 beta=0 with running stats (0, 1). Deterministic per seed.
template <class S>
MlpT<S> init_model(int n_blocks, int block_dim, int dof, uint64_t seed);

// Train mode uses batch statistics (B >= 2) and updates running stats with
// momentum 0.1; fills `cache` when given. Eval mode uses running statistics,
// never mutates the model, and processes rows independently: each row's
// result is bit-identical however the rows are batched.
template <class S>
typename MlpT<S>::Vec forward(MlpT<S>& model, const typename MlpT<S>::Mat& raw, Mode mode,
                              ForwardCacheT<S>* cache = nullptr);

template <class S>
typename MlpT<S>::Vec forward_eval(const MlpT<S>& model, const typename MlpT<S>::Mat& raw);

// Mean absolute error and its exact reverse-mode gradients, including the
// dependence of batch statistics on the inputs. Subgradient 0 at kinks.
template <class S>
S loss_and_grads(MlpT<S>& model, const typename MlpT<S>::Mat& raw, const typename MlpT<S>::Vec& labels,
                 GradsT<S>& grads, ForwardCacheT<S>* cache = nullptr);

template <class S>
struct AdamStateT {
    GradsT<S> m, v;
    long step = 0;
    double lr = 1e-3;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    // ReduceLROnPlateau bookkeeping
    double plateau_factor = 0.1;
    int plateau_patience = 10;
    int plateau_counter = 0;
    double best_val_loss = std::numeric_limits<double>::infinity();

    static AdamStateT init(const MlpT<S>& model, double lr);
};

template <class S>
void adam_step(MlpT<S>& model, const GradsT<S>& grads, AdamStateT<S>& state);

// Improvement resets the counter; more than `patience` consecutive
// non-improving epochs multiply lr by `factor`.
template <class S>
void plateau_scheduler_step(AdamStateT<S>& state, double val_loss);

struct TrainConfig {
    int n_blocks = 6;
    int block_dim = 256;
    int batch_size = 4096;
    int epochs = 200;
    uint64_t seed = 1;
    double lr = 1e-3;
    bool verbose = false;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0;
    double val_loss = 0;
    double lr = 0;
};

struct TrainResult {
    Mlp model;  // checkpoint with the best validation loss
    std::vector<EpochStats> history;
    int best_epoch = -1;
    double best_val_loss = std::numeric_limits<double>::infinity();
};

// Normalizer per the input layout: positions are centered on the training
// mean and scaled by 1/reach, joint angles map affinely to [-1, 1] via the
// joint limits.
void make_normalizer(const RobotModel& robot, const std::vector<TrainingSample>& train_split,
                     Eigen::VectorXf& shift, Eigen::VectorXf& scale);

TrainResult train(const RobotModel& robot, const std::vector<TrainingSample>& train_split,
                  const std::vector<TrainingSample>& val_split, const TrainConfig& cfg);

// Writes "epoch,train_loss,val_loss,lr" rows.
void save_history_csv(const std::string& path, const std::vector<EpochStats>& history);

// Proxy for the minimum distance of a point cloud to the motion's swept
// volume: min over per-point predictions, with the index of the minimizer.
std::pair<double, int> predict_min_distance(const Mlp& model, const std::vector<Vec3>& cloud,
                                            const Motion& m);

// Versioned little-endian binary with all parameters, running statistics and
// the input normalizer.
void save_checkpoint(const std::string& path, const Mlp& model);
Mlp load_checkpoint(const std::string& path);

}  // namespace sweptnet
