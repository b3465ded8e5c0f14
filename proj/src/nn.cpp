#include "sweptnet/nn.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "sweptnet/errors.hpp"
#include "sweptnet/rng.hpp"

namespace sweptnet {

namespace {
constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;
}  // namespace

template <class S>
long MlpT<S>::param_count() const {
    long count = input_weight.size() + input_bias.size();
    for (const Block& b : blocks) count += b.weight.size() + b.bias.size() + b.gamma.size() + b.beta.size();
    count += output_weight.size() + 1;
    return count;
}

template <class S>
GradsT<S> GradsT<S>::zeros_like(const MlpT<S>& m) {
    GradsT<S> g;
    g.input_weight.setZero(m.input_weight.rows(), m.input_weight.cols());
    g.input_bias.setZero(m.input_bias.size());
    g.blocks.resize(m.blocks.size());
    for (size_t i = 0; i < m.blocks.size(); ++i) {
        g.blocks[i].weight.setZero(m.blocks[i].weight.rows(), m.blocks[i].weight.cols());
        g.blocks[i].bias.setZero(m.blocks[i].bias.size());
        g.blocks[i].gamma.setZero(m.blocks[i].gamma.size());
        g.blocks[i].beta.setZero(m.blocks[i].beta.size());
    }
    g.output_weight.setZero(m.output_weight.size());
    g.output_bias = 0;
    return g;
}

template <class S>
void GradsT<S>::set_zero() {
    input_weight.setZero();
    input_bias.setZero();
    for (auto& b : blocks) {
        b.weight.setZero();
        b.bias.setZero();
        b.gamma.setZero();
        b.beta.setZero();
    }
    output_weight.setZero();
    output_bias = 0;
}

template <class S>
MlpT<S> init_model(int n_blocks, int block_dim, int dof, uint64_t seed) {
    if (n_blocks < 1 || block_dim < 1 || dof < 1)
        throw std::invalid_argument("init_model: n_blocks, block_dim and dof must be >= 1");
    MlpT<S> m;
    m.n_blocks = n_blocks;
    m.block_dim = block_dim;
    m.input_dim = 3 + 2 * dof;

    Rng rng(seed);
    auto fill_uniform = [&](typename MlpT<S>::Wmat& w, long rows, long cols, long fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        w.resize(rows, cols);
        for (long r = 0; r < rows; ++r)
            for (long c = 0; c < cols; ++c) w(r, c) = static_cast<S>(rng.uniform(-bound, bound));
    };

    fill_uniform(m.input_weight, block_dim, m.input_dim, m.input_dim);
    m.input_bias.setZero(block_dim);
    m.blocks.resize(static_cast<size_t>(n_blocks));
    const long concat_dim = block_dim + m.input_dim;
    for (auto& b : m.blocks) {
        fill_uniform(b.weight, block_dim, concat_dim, concat_dim);
        b.bias.setZero(block_dim);
        b.gamma.setOnes(block_dim);
        b.beta.setZero(block_dim);
        b.running_mean.setZero(block_dim);
        b.running_var.setOnes(block_dim);
    }
    typename MlpT<S>::Wmat out_w;
    fill_uniform(out_w, 1, block_dim, block_dim);
    m.output_weight = out_w.row(0).transpose();
    m.output_bias = 0;
    m.norm_shift.setZero(m.input_dim);
    m.norm_scale.setOnes(m.input_dim);
    return m;
}

template <class S>
typename MlpT<S>::Vec forward_eval(const MlpT<S>& model, const typename MlpT<S>::Mat& raw) {
    using Vec = typename MlpT<S>::Vec;
    if (raw.cols() != model.input_dim) throw std::invalid_argument("forward: input width mismatch");
    if (raw.rows() < 1) throw std::invalid_argument("forward: batch must be non-empty");
    const long B = raw.rows();
    const long N = model.block_dim;
    const long in = model.input_dim;

    // Fold running stats into a per-feature affine map once per call.
    std::vector<Vec> bn_scale(model.blocks.size()), bn_bias(model.blocks.size());
    for (size_t i = 0; i < model.blocks.size(); ++i) {
        const auto& blk = model.blocks[i];
        bn_scale[i] =
            (blk.gamma.array() / (blk.running_var.array() + static_cast<S>(kBnEps)).sqrt()).matrix();
        bn_bias[i] = (blk.beta.array() - blk.running_mean.array() * bn_scale[i].array()).matrix();
    }

    Vec out(B), z(in), h(N), a(N);
    // Rows are processed one at a time with a fixed accumulation order, so a
    // row's output does not depend on how the batch was assembled.
    for (long r = 0; r < B; ++r) {
        z = (raw.row(r).transpose() - model.norm_shift).cwiseProduct(model.norm_scale);
        h = model.input_bias;
        for (long k = 0; k < in; ++k) h.noalias() += z[k] * model.input_weight.col(k);
        for (size_t i = 0; i < model.blocks.size(); ++i) {
            const auto& blk = model.blocks[i];
            a = blk.bias;
            for (long k = 0; k < N; ++k) a.noalias() += h[k] * blk.weight.col(k);
            for (long k = 0; k < in; ++k) a.noalias() += z[k] * blk.weight.col(N + k);
            h.array() += a.cwiseMax(S(0)).array() * bn_scale[i].array() + bn_bias[i].array();
        }
        out[r] = model.output_weight.dot(h) + model.output_bias;
    }
    return out;
}

template <class S>
typename MlpT<S>::Vec forward(MlpT<S>& model, const typename MlpT<S>::Mat& raw, Mode mode,
                              ForwardCacheT<S>* cache) {
    using Mat = typename MlpT<S>::Mat;
    using Vec = typename MlpT<S>::Vec;
    if (mode == Mode::Eval) return forward_eval(model, raw);

    if (raw.cols() != model.input_dim) throw std::invalid_argument("forward: input width mismatch");
    const long B = raw.rows();
    if (B < 2) throw std::invalid_argument("forward: train mode needs a batch of at least 2 rows");
    const long N = model.block_dim;
    const long in = model.input_dim;
    const size_t nb = model.blocks.size();

    ForwardCacheT<S> local;
    ForwardCacheT<S>& c = cache ? *cache : local;
    c.h.resize(nb + 1);
    c.pre_relu.resize(nb);
    c.xhat.resize(nb);
    c.concat.resize(nb);
    c.inv_std.resize(nb);

    c.z = ((raw.rowwise() - model.norm_shift.transpose()).array().rowwise() *
           model.norm_scale.transpose().array())
              .matrix();
    c.h[0].noalias() = c.z * model.input_weight.transpose();
    c.h[0].rowwise() += model.input_bias.transpose();

    for (size_t i = 0; i < nb; ++i) {
        auto& blk = model.blocks[i];
        Mat& u = c.concat[i];
        u.resize(B, N + in);
        u.leftCols(N) = c.h[i];
        u.rightCols(in) = c.z;

        Mat& a = c.pre_relu[i];
        a.noalias() = u * blk.weight.transpose();
        a.rowwise() += blk.bias.transpose();

        Mat r = a.cwiseMax(S(0));
        const Vec mean = r.colwise().mean().transpose();
        Mat centered = r.rowwise() - mean.transpose();
        const Vec var = centered.array().square().colwise().mean().transpose().matrix();
        Vec& inv_std = c.inv_std[i];
        inv_std = (var.array() + static_cast<S>(kBnEps)).rsqrt().matrix();

        Mat& xhat = c.xhat[i];
        xhat = (centered.array().rowwise() * inv_std.transpose().array()).matrix();

        c.h[i + 1] = ((xhat.array().rowwise() * blk.gamma.transpose().array()).rowwise() +
                      blk.beta.transpose().array())
                         .matrix();
        c.h[i + 1] += c.h[i];

        const S unbias = static_cast<S>(B) / static_cast<S>(B - 1);
        blk.running_mean = (1 - static_cast<S>(kBnMomentum)) * blk.running_mean +
                           static_cast<S>(kBnMomentum) * mean;
        blk.running_var = (1 - static_cast<S>(kBnMomentum)) * blk.running_var +
                          static_cast<S>(kBnMomentum) * unbias * var;
    }

    c.pred.noalias() = c.h[nb] * model.output_weight;
    c.pred.array() += model.output_bias;
    return c.pred;
}

template <class S>
S loss_and_grads(MlpT<S>& model, const typename MlpT<S>::Mat& raw, const typename MlpT<S>::Vec& labels,
                 GradsT<S>& grads, ForwardCacheT<S>* cache) {
    using Mat = typename MlpT<S>::Mat;
    using Vec = typename MlpT<S>::Vec;
    if (labels.size() != raw.rows()) throw std::invalid_argument("loss_and_grads: labels/batch size mismatch");

    ForwardCacheT<S> local;
    ForwardCacheT<S>& c = cache ? *cache : local;
    forward(model, raw, Mode::Train, &c);

    const long B = raw.rows();
    const long N = model.block_dim;
    const size_t nb = model.blocks.size();

    const Vec residual = c.pred - labels;
    const S loss = residual.cwiseAbs().mean();
    if (!std::isfinite(static_cast<double>(loss)))
        throw std::runtime_error("loss_and_grads: non-finite loss");

    if (grads.blocks.size() != nb) grads = GradsT<S>::zeros_like(model);

    Vec dpred = residual.unaryExpr([](S v) { return S(v > 0) - S(v < 0); }) / static_cast<S>(B);

    grads.output_weight.noalias() = c.h[nb].transpose() * dpred;
    grads.output_bias = dpred.sum();
    Mat dh = dpred * model.output_weight.transpose();

    for (size_t idx = nb; idx-- > 0;) {
        const auto& blk = model.blocks[idx];
        auto& gblk = grads.blocks[idx];

        // dh is the gradient w.r.t. h_{idx+1} = batchnorm output + h_idx.
        const Mat& dy = dh;
        gblk.beta = dy.colwise().sum().transpose();
        gblk.gamma = (dy.array() * c.xhat[idx].array()).colwise().sum().transpose().matrix();

        // Fused batch-norm backward through the batch statistics.
        Mat dr = (static_cast<S>(B) * dy).rowwise() - gblk.beta.transpose();
        dr.array() -= c.xhat[idx].array().rowwise() * gblk.gamma.transpose().array();
        dr.array().rowwise() *=
            (blk.gamma.array() * c.inv_std[idx].array() / static_cast<S>(B)).transpose();

        // ReLU mask, subgradient 0 at the kink.
        Mat da = ((c.pre_relu[idx].array() > S(0)).template cast<S>() * dr.array()).matrix();

        gblk.weight.noalias() = da.transpose() * c.concat[idx];
        gblk.bias = da.colwise().sum().transpose();

        Mat du = da * blk.weight;
        Mat dh_prev = du.leftCols(N) + dh;  // linear path plus the skip
        dh.swap(dh_prev);
    }

    grads.input_weight.noalias() = dh.transpose() * c.z;
    grads.input_bias = dh.colwise().sum().transpose();
    return loss;
}

template <class S>
AdamStateT<S> AdamStateT<S>::init(const MlpT<S>& model, double lr_) {
    AdamStateT<S> s;
    s.m = GradsT<S>::zeros_like(model);
    s.v = GradsT<S>::zeros_like(model);
    s.lr = lr_;
    return s;
}

template <class S>
void adam_step(MlpT<S>& model, const GradsT<S>& grads, AdamStateT<S>& state) {
    state.step += 1;
    const double corr1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double corr2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    const S b1 = static_cast<S>(state.beta1), b2 = static_cast<S>(state.beta2);
    const S lr = static_cast<S>(state.lr);
    const S eps = static_cast<S>(state.eps);
    const S c1 = static_cast<S>(corr1), c2 = static_cast<S>(corr2);

    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
        m = b1 * m + (1 - b1) * g;
        v.array() = b2 * v.array() + (1 - b2) * g.array().square();
        param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    };

    update(model.input_weight, state.m.input_weight, state.v.input_weight, grads.input_weight);
    update(model.input_bias, state.m.input_bias, state.v.input_bias, grads.input_bias);
    for (size_t i = 0; i < model.blocks.size(); ++i) {
        update(model.blocks[i].weight, state.m.blocks[i].weight, state.v.blocks[i].weight,
               grads.blocks[i].weight);
        update(model.blocks[i].bias, state.m.blocks[i].bias, state.v.blocks[i].bias, grads.blocks[i].bias);
        update(model.blocks[i].gamma, state.m.blocks[i].gamma, state.v.blocks[i].gamma,
               grads.blocks[i].gamma);
        update(model.blocks[i].beta, state.m.blocks[i].beta, state.v.blocks[i].beta, grads.blocks[i].beta);
    }
    update(model.output_weight, state.m.output_weight, state.v.output_weight, grads.output_weight);
    {
        S& m = state.m.output_bias;
        S& v = state.v.output_bias;
        m = b1 * m + (1 - b1) * grads.output_bias;
        v = b2 * v + (1 - b2) * grads.output_bias * grads.output_bias;
        model.output_bias -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
    }
}

template <class S>
void plateau_scheduler_step(AdamStateT<S>& state, double val_loss) {
    if (!std::isfinite(val_loss)) throw std::invalid_argument("plateau_scheduler_step: non-finite loss");
    if (val_loss < state.best_val_loss - 1e-12) {
        state.best_val_loss = val_loss;
        state.plateau_counter = 0;
    } else if (++state.plateau_counter > state.plateau_patience) {
        state.lr *= state.plateau_factor;
        state.plateau_counter = 0;
    }
}

void make_normalizer(const RobotModel& robot, const std::vector<TrainingSample>& train_split,
                     Eigen::VectorXf& shift, Eigen::VectorXf& scale) {
    const int dof = robot.dof();
    const int input_dim = 3 + 2 * dof;
    shift.setZero(input_dim);
    scale.setOnes(input_dim);

    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const TrainingSample& s : train_split) mean += s.x.cast<double>();
    if (!train_split.empty()) mean /= static_cast<double>(train_split.size());
    const double inv_reach = 1.0 / std::max(robot.reach(), 1e-9);
    for (int i = 0; i < 3; ++i) {
        shift[i] = static_cast<float>(mean[i]);
        scale[i] = static_cast<float>(inv_reach);
    }
    for (int j = 0; j < dof; ++j) {
        const Joint& joint = robot.joints[static_cast<size_t>(j)];
        const float mid = static_cast<float>(0.5 * (joint.lower + joint.upper));
        const float span = static_cast<float>(2.0 / (joint.upper - joint.lower));
        shift[3 + j] = mid;
        scale[3 + j] = span;
        shift[3 + dof + j] = mid;
        scale[3 + dof + j] = span;
    }
}

namespace {

void fill_rows(Mlp::Mat& dst, const std::vector<TrainingSample>& samples, const std::vector<long>& order,
               long begin, long end, Eigen::VectorXf& labels) {
    const long rows = end - begin;
    for (long r = 0; r < rows; ++r) {
        const TrainingSample& s = samples[static_cast<size_t>(order[static_cast<size_t>(begin + r)])];
        const long dof = s.q0.size();
        dst(r, 0) = s.x[0];
        dst(r, 1) = s.x[1];
        dst(r, 2) = s.x[2];
        for (long i = 0; i < dof; ++i) dst(r, 3 + i) = s.q0[i];
        for (long i = 0; i < dof; ++i) dst(r, 3 + dof + i) = s.q1[i];
        labels[r] = s.delta;
    }
}

double eval_split_loss(const Mlp& model, const std::vector<TrainingSample>& split) {
    const long chunk = 8192;
    const long n = static_cast<long>(split.size());
    Mlp::Mat x(std::min(chunk, n), model.input_dim);
    Eigen::VectorXf y(std::min(chunk, n));
    std::vector<long> identity(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) identity[static_cast<size_t>(i)] = i;
    double total = 0;
    for (long start = 0; start < n; start += chunk) {
        const long end = std::min(n, start + chunk);
        x.conservativeResize(end - start, Eigen::NoChange);
        y.conservativeResize(end - start);
        fill_rows(x, split, identity, start, end, y);
        const Eigen::VectorXf pred = forward_eval(model, x);
        total += (pred - y).cwiseAbs().cast<double>().sum();
    }
    return n > 0 ? total / static_cast<double>(n) : 0.0;
}

}  // namespace

TrainResult train(const RobotModel& robot, const std::vector<TrainingSample>& train_split,
                  const std::vector<TrainingSample>& val_split, const TrainConfig& cfg) {
    if (train_split.empty() || val_split.empty())
        throw std::invalid_argument("train: train and validation splits must be non-empty");
    if (cfg.batch_size < 2) throw std::invalid_argument("train: batch_size must be >= 2");
    const int dof = robot.dof();
    for (const auto* split : {&train_split, &val_split})
        if (!split->empty() && (*split)[0].q0.size() != dof)
            throw std::invalid_argument("train: dataset dof does not match robot dof");

    TrainResult result;
    Mlp model = init_model<float>(cfg.n_blocks, cfg.block_dim, dof, cfg.seed);
    make_normalizer(robot, train_split, model.norm_shift, model.norm_scale);

    result.model = model;
    if (cfg.epochs == 0) return result;

    AdamStateT<float> state = AdamStateT<float>::init(model, cfg.lr);
    GradsT<float> grads = GradsT<float>::zeros_like(model);
    ForwardCacheT<float> cache;

    const long n = static_cast<long>(train_split.size());
    std::vector<long> order(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    Mlp::Mat batch(std::min<long>(cfg.batch_size, n), model.input_dim);
    Eigen::VectorXf labels(batch.rows());

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(substream_seed(cfg.seed, 0x5eed0000ULL + static_cast<uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        const double epoch_lr = state.lr;
        double loss_sum = 0;
        long row_count = 0;
        for (long start = 0; start < n; start += cfg.batch_size) {
            const long end = std::min(n, start + cfg.batch_size);
            if (end - start < 2) continue;  // batch statistics need >= 2 rows
            batch.conservativeResize(end - start, Eigen::NoChange);
            labels.conservativeResize(end - start);
            fill_rows(batch, train_split, order, start, end, labels);
            float loss;
            try {
                loss = loss_and_grads(model, batch, labels, grads, &cache);
            } catch (const std::runtime_error& e) {
                throw std::runtime_error("train: aborted at epoch " + std::to_string(epoch) + ": " + e.what());
            }
            adam_step(model, grads, state);
            loss_sum += static_cast<double>(loss) * static_cast<double>(end - start);
            row_count += end - start;
        }

        const double train_loss = loss_sum / static_cast<double>(row_count);
        const double val_loss = eval_split_loss(model, val_split);
        if (!std::isfinite(val_loss))
            throw std::runtime_error("train: non-finite validation loss at epoch " + std::to_string(epoch));
        plateau_scheduler_step(state, val_loss);

        if (val_loss < result.best_val_loss) {
            result.best_val_loss = val_loss;
            result.best_epoch = epoch;
            result.model = model;
        }
        result.history.push_back({epoch, train_loss, val_loss, epoch_lr});
        if (cfg.verbose)
            std::fprintf(stderr, "epoch %3d  train %.6f  val %.6f  lr %.2e\n", epoch, train_loss, val_loss,
                         epoch_lr);
    }
    return result;
}

void save_history_csv(const std::string& path, const std::vector<EpochStats>& history) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open history CSV for writing: " + path);
    out << "epoch,train_loss,val_loss,lr\n";
    char buf[160];
    for (const EpochStats& e : history) {
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g\n", e.epoch, e.train_loss, e.val_loss, e.lr);
        out << buf;
    }
    if (!out) throw IoError("failed writing history CSV: " + path);
}

std::pair<double, int> predict_min_distance(const Mlp& model, const std::vector<Vec3>& cloud,
                                            const Motion& m) {
    if (cloud.empty()) throw std::invalid_argument("predict_min_distance: empty point cloud");
    const long dof = m.q0.size();
    if (3 + 2 * dof != model.input_dim)
        throw std::invalid_argument("predict_min_distance: motion dof does not match model");
    Mlp::Mat raw(static_cast<long>(cloud.size()), model.input_dim);
    for (long r = 0; r < raw.rows(); ++r) {
        const Vec3& p = cloud[static_cast<size_t>(r)];
        raw(r, 0) = static_cast<float>(p.x());
        raw(r, 1) = static_cast<float>(p.y());
        raw(r, 2) = static_cast<float>(p.z());
        for (long i = 0; i < dof; ++i) raw(r, 3 + i) = static_cast<float>(m.q0[i]);
        for (long i = 0; i < dof; ++i) raw(r, 3 + dof + i) = static_cast<float>(m.q1[i]);
    }
    const Eigen::VectorXf pred = forward_eval(model, raw);
    int best = 0;
    for (long i = 1; i < pred.size(); ++i)
        if (pred[i] < pred[best]) best = static_cast<int>(i);
    return {static_cast<double>(pred[best]), best};
}

namespace {

constexpr char kCheckpointMagic[8] = {'S', 'V', 'C', 'K', 'P', 'T', '0', '1'};
constexpr uint32_t kCheckpointVersion = 1;

void write_floats(std::ostream& out, const float* data, size_t count) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(float)));
}

void read_floats(std::istream& in, float* data, size_t count, const std::string& path) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<size_t>(in.gcount()) != count * sizeof(float))
        throw TruncationError(path + ": file ends inside tensor data");
}

}  // namespace

void save_checkpoint(const std::string& path, const Mlp& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    const uint32_t header[4] = {kCheckpointVersion, static_cast<uint32_t>(model.n_blocks),
                                static_cast<uint32_t>(model.block_dim),
                                static_cast<uint32_t>(model.input_dim)};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    write_floats(out, model.norm_shift.data(), static_cast<size_t>(model.norm_shift.size()));
    write_floats(out, model.norm_scale.data(), static_cast<size_t>(model.norm_scale.size()));
    write_floats(out, model.input_weight.data(), static_cast<size_t>(model.input_weight.size()));
    write_floats(out, model.input_bias.data(), static_cast<size_t>(model.input_bias.size()));
    for (const auto& b : model.blocks) {
        write_floats(out, b.weight.data(), static_cast<size_t>(b.weight.size()));
        write_floats(out, b.bias.data(), static_cast<size_t>(b.bias.size()));
        write_floats(out, b.gamma.data(), static_cast<size_t>(b.gamma.size()));
        write_floats(out, b.beta.data(), static_cast<size_t>(b.beta.size()));
        write_floats(out, b.running_mean.data(), static_cast<size_t>(b.running_mean.size()));
        write_floats(out, b.running_var.data(), static_cast<size_t>(b.running_var.size()));
    }
    write_floats(out, model.output_weight.data(), static_cast<size_t>(model.output_weight.size()));
    write_floats(out, &model.output_bias, 1);
    if (!out) throw IoError("failed writing checkpoint: " + path);
}

Mlp load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
        throw FormatError(path + ": not a sweptnet checkpoint");
    uint32_t header[4];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in) throw TruncationError(path + ": file ends inside header");
    if (header[0] != kCheckpointVersion)
        throw VersionError(path + ": checkpoint version " + std::to_string(header[0]) +
                           " not supported (expected " + std::to_string(kCheckpointVersion) + ")");
    const int n_blocks = static_cast<int>(header[1]);
    const int block_dim = static_cast<int>(header[2]);
    const int input_dim = static_cast<int>(header[3]);
    if (n_blocks < 1 || block_dim < 1 || input_dim < 5 || (input_dim - 3) % 2 != 0)
        throw FormatError(path + ": implausible architecture header");

    Mlp model;
    model.n_blocks = n_blocks;
    model.block_dim = block_dim;
    model.input_dim = input_dim;
    model.norm_shift.resize(input_dim);
    model.norm_scale.resize(input_dim);
    read_floats(in, model.norm_shift.data(), static_cast<size_t>(input_dim), path);
    read_floats(in, model.norm_scale.data(), static_cast<size_t>(input_dim), path);
    model.input_weight.resize(block_dim, input_dim);
    model.input_bias.resize(block_dim);
    read_floats(in, model.input_weight.data(), static_cast<size_t>(model.input_weight.size()), path);
    read_floats(in, model.input_bias.data(), static_cast<size_t>(block_dim), path);
    model.blocks.resize(static_cast<size_t>(n_blocks));
    for (auto& b : model.blocks) {
        b.weight.resize(block_dim, block_dim + input_dim);
        b.bias.resize(block_dim);
        b.gamma.resize(block_dim);
        b.beta.resize(block_dim);
        b.running_mean.resize(block_dim);
        b.running_var.resize(block_dim);
        read_floats(in, b.weight.data(), static_cast<size_t>(b.weight.size()), path);
        read_floats(in, b.bias.data(), static_cast<size_t>(block_dim), path);
        read_floats(in, b.gamma.data(), static_cast<size_t>(block_dim), path);
        read_floats(in, b.beta.data(), static_cast<size_t>(block_dim), path);
        read_floats(in, b.running_mean.data(), static_cast<size_t>(block_dim), path);
        read_floats(in, b.running_var.data(), static_cast<size_t>(block_dim), path);
    }
    model.output_weight.resize(block_dim);
    read_floats(in, model.output_weight.data(), static_cast<size_t>(block_dim), path);
    read_floats(in, &model.output_bias, 1, path);
    in.peek();
    if (!in.eof()) throw FormatError(path + ": trailing bytes after parameters");
    return model;
}

// Explicit instantiations: float for production, double for test oracles.
template struct MlpT<float>;
template struct MlpT<double>;
template struct GradsT<float>;
template struct GradsT<double>;
template struct AdamStateT<float>;
template struct AdamStateT<double>;
template MlpT<float> init_model<float>(int, int, int, uint64_t);
template MlpT<double> init_model<double>(int, int, int, uint64_t);
template MlpT<float>::Vec forward_eval<float>(const MlpT<float>&, const MlpT<float>::Mat&);
template MlpT<double>::Vec forward_eval<double>(const MlpT<double>&, const MlpT<double>::Mat&);
template MlpT<float>::Vec forward<float>(MlpT<float>&, const MlpT<float>::Mat&, Mode, ForwardCacheT<float>*);
template MlpT<double>::Vec forward<double>(MlpT<double>&, const MlpT<double>::Mat&, Mode,
                                           ForwardCacheT<double>*);
template float loss_and_grads<float>(MlpT<float>&, const MlpT<float>::Mat&, const MlpT<float>::Vec&,
                                     GradsT<float>&, ForwardCacheT<float>*);
template double loss_and_grads<double>(MlpT<double>&, const MlpT<double>::Mat&, const MlpT<double>::Vec&,
                                       GradsT<double>&, ForwardCacheT<double>*);
template void adam_step<float>(MlpT<float>&, const GradsT<float>&, AdamStateT<float>&);
template void adam_step<double>(MlpT<double>&, const GradsT<double>&, AdamStateT<double>&);
template void plateau_scheduler_step<float>(AdamStateT<float>&, double);
template void plateau_scheduler_step<double>(AdamStateT<double>&, double);

}  // namespace sweptnet
