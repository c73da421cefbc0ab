#include "clf/heads/losses.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace clf::heads {

namespace {
constexpr double kBceEps = 1e-7;

struct InstanceIndex {
  std::vector<std::uint32_t> ids;                  // ascending
  std::vector<std::vector<std::size_t>> members;   // parallel to ids
  std::vector<Eigen::VectorXd> means;
};

InstanceIndex build_index(const EmbeddingField& field) {
  field.validate();
  std::map<std::uint32_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field.instance[i] != 0) groups[field.instance[i]].push_back(i);
  }
  InstanceIndex index;
  for (auto& [id, members] : groups) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(field.dim);
    for (const std::size_t i : members) mean += field.embedding(i);
    mean /= static_cast<double>(members.size());
    index.ids.push_back(id);
    index.members.push_back(std::move(members));
    index.means.push_back(std::move(mean));
  }
  return index;
}
}  // namespace

std::vector<std::uint32_t> EmbeddingField::instance_ids() const {
  std::vector<std::uint32_t> ids;
  for (const std::uint32_t id : instance) {
    if (id != 0) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

void LossParams::validate() const {
  const double all[] = {delta_pull,   delta_push,    lambda_2d_pull, lambda_2d_push,
                        lambda_2d_seg, lambda_3d_pull, lambda_3d_push, lambda_3d_seg,
                        lambda_3d_offset, lambda_3d_height};
  for (const double v : all) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      raise(ErrorCode::invalid_argument, "loss params must be finite and nonnegative");
    }
  }
  if (!(delta_push > 2.0 * delta_pull)) {
    raise(ErrorCode::invalid_argument, "delta_push must exceed 2*delta_pull");
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LossResult pull_loss(const EmbeddingField& field, double delta_pull) {
  const InstanceIndex index = build_index(field);
  const std::size_t n_instances = index.ids.size();
  if (n_instances == 0) {
    raise(ErrorCode::no_foreground, "pull loss needs at least one instance");
  }

  LossResult out;
  out.grad.assign(field.embeddings.size(), 0.0);
  const double inv_c = 1.0 / static_cast<double>(n_instances);

  for (std::size_t c = 0; c < n_instances; ++c) {
    const auto& members = index.members[c];
    const Eigen::VectorXd& mean = index.means[c];
    const double inv_n = 1.0 / static_cast<double>(members.size());

    std::vector<double> hinge(members.size());
    Eigen::VectorXd hinge_dir_sum = Eigen::VectorXd::Zero(field.dim);
    std::vector<Eigen::VectorXd> dirs(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      const Eigen::VectorXd diff = mean - field.embedding(members[k]);
      const double dist = diff.norm();
      hinge[k] = std::max(0.0, dist - delta_pull);
      dirs[k] = dist > 0.0 ? (diff / dist).eval() : Eigen::VectorXd::Zero(field.dim);
      out.value += inv_c * inv_n * hinge[k] * hinge[k];
      hinge_dir_sum += hinge[k] * dirs[k];
    }
    // d/dx_j of the hinge terms: every member moves the mean by 1/N.
    for (std::size_t k = 0; k < members.size(); ++k) {
      const Eigen::VectorXd g =
          (2.0 * inv_c * inv_n) * (inv_n * hinge_dir_sum - hinge[k] * dirs[k]);
      double* dst = out.grad.data() + members[k] * static_cast<std::size_t>(field.dim);
      for (int d = 0; d < field.dim; ++d) dst[d] += g[d];
    }
  }
  return out;
}

LossResult push_loss(const EmbeddingField& field, double delta_push) {
  const InstanceIndex index = build_index(field);
  const std::size_t n_instances = index.ids.size();

  LossResult out;
  out.grad.assign(field.embeddings.size(), 0.0);
  if (n_instances < 2) return out;  // no pairs to push apart

  const double norm = 1.0 / (static_cast<double>(n_instances) *
                             static_cast<double>(n_instances - 1));
  std::vector<Eigen::VectorXd> mean_grad(n_instances, Eigen::VectorXd::Zero(field.dim));

  for (std::size_t a = 0; a < n_instances; ++a) {
    for (std::size_t b = a + 1; b < n_instances; ++b) {
      const Eigen::VectorXd diff = index.means[a] - index.means[b];
      const double dist = diff.norm();
      const double hinge = std::max(0.0, delta_push - dist);
      if (hinge <= 0.0) continue;
      out.value += 2.0 * norm * hinge * hinge;  // ordered pairs count both directions
      if (dist > 0.0) {
        const Eigen::VectorXd g = (-4.0 * norm * hinge / dist) * diff;
        mean_grad[a] += g;
        mean_grad[b] -= g;
      }
    }
  }
  for (std::size_t c = 0; c < n_instances; ++c) {
    const double inv_n = 1.0 / static_cast<double>(index.members[c].size());
    for (const std::size_t i : index.members[c]) {
      double* dst = out.grad.data() + i * static_cast<std::size_t>(field.dim);
      for (int d = 0; d < field.dim; ++d) dst[d] += inv_n * mean_grad[c][d];
    }
  }
  return out;
}

double embed_loss(const EmbeddingField& field, double lambda_pull, double lambda_push,
                  double delta_pull, double delta_push) {
  return lambda_pull * pull_loss(field, delta_pull).value +
         lambda_push * push_loss(field, delta_push).value;
}

LossResult weighted_bce(std::span<const double> conf, std::span<const std::uint8_t> gt_mask) {
  if (conf.size() != gt_mask.size()) {
    raise(ErrorCode::shape_mismatch, "conf and mask sizes differ");
  }
  if (conf.empty()) raise(ErrorCode::invalid_argument, "empty confidence map");

  const std::size_t n = conf.size();
  std::size_t n_fg = 0;
  for (const std::uint8_t y : gt_mask) n_fg += (y != 0);
  const std::size_t n_bg = n - n_fg;

  LossResult out;
  out.degenerate = (n_fg == 0 || n_bg == 0);
  const double w_fg =
      out.degenerate ? 1.0 : static_cast<double>(n) / (2.0 * static_cast<double>(n_fg));
  const double w_bg =
      out.degenerate ? 1.0 : static_cast<double>(n) / (2.0 * static_cast<double>(n_bg));

  out.grad.assign(n, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool fg = gt_mask[i] != 0;
    const double w = fg ? w_fg : w_bg;
    const double p = std::clamp(conf[i], kBceEps, 1.0 - kBceEps);
    out.value += inv_n * w * -(fg ? std::log(p) : std::log(1.0 - p));
    if (conf[i] > kBceEps && conf[i] < 1.0 - kBceEps) {
      out.grad[i] = inv_n * w * (fg ? -1.0 / p : 1.0 / (1.0 - p));
    }
  }
  return out;
}

LossResult offset_loss(std::span<const double> offset_logits, std::span<const double> gt_offset,
                       std::span<const std::uint8_t> seg_mask) {
  if (offset_logits.size() != gt_offset.size() || offset_logits.size() != seg_mask.size()) {
    raise(ErrorCode::shape_mismatch, "offset grids have mismatched sizes");
  }
  LossResult out;
  out.grad.assign(offset_logits.size(), 0.0);
  for (std::size_t i = 0; i < offset_logits.size(); ++i) {
    if (seg_mask[i] == 0) continue;
    const double s = sigmoid(offset_logits[i]);
    const double err = s - gt_offset[i];
    out.value += err * err;
    out.grad[i] = 2.0 * err * s * (1.0 - s);
  }
  return out;
}

LossResult height_loss(std::span<const double> height, std::span<const double> gt_height,
                       std::span<const std::uint8_t> seg_mask) {
  if (height.size() != gt_height.size() || height.size() != seg_mask.size()) {
    raise(ErrorCode::shape_mismatch, "height grids have mismatched sizes");
  }
  LossResult out;
  out.grad.assign(height.size(), 0.0);
  for (std::size_t i = 0; i < height.size(); ++i) {
    if (seg_mask[i] == 0) continue;
    const double err = height[i] - gt_height[i];
    out.value += err * err;
    out.grad[i] = 2.0 * err;
  }
  return out;
}

double total_2d_loss(const EmbeddingField& field, std::span<const double> conf,
                     std::span<const std::uint8_t> gt_mask, const LossParams& params) {
  params.validate();
  return embed_loss(field, params.lambda_2d_pull, params.lambda_2d_push, params.delta_pull,
                    params.delta_push) +
         params.lambda_2d_seg * weighted_bce(conf, gt_mask).value;
}

double total_3d_loss(const EmbeddingField& field, std::span<const double> conf,
                     std::span<const double> offset_logits, std::span<const double> height,
                     std::span<const std::uint8_t> gt_mask, std::span<const double> gt_offset,
                     std::span<const double> gt_height, const LossParams& params) {
  params.validate();
  return embed_loss(field, params.lambda_3d_pull, params.lambda_3d_push, params.delta_pull,
                    params.delta_push) +
         params.lambda_3d_seg * weighted_bce(conf, gt_mask).value +
         params.lambda_3d_offset * offset_loss(offset_logits, gt_offset, gt_mask).value +
         params.lambda_3d_height * height_loss(height, gt_height, gt_mask).value;
}

}  // namespace clf::heads
