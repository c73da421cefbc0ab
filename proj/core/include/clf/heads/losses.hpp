#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "clf/heads/embedding.hpp"

namespace clf::heads {

/// Margins and weights for the training losses. delta_push > 2*delta_pull is
/// required so pulled clusters cannot satisfy both hinges at once.
struct LossParams {
  double delta_pull = 0.5;
  double delta_push = 3.0;
  double lambda_2d_pull = 1.0;
  double lambda_2d_push = 1.0;
  double lambda_2d_seg = 2.0;
  double lambda_3d_pull = 1.0;
  double lambda_3d_push = 1.0;
  double lambda_3d_seg = 2.0;
  double lambda_3d_offset = 1.0;
  double lambda_3d_height = 1.0;

  void validate() const;
};

/// Scalar loss plus its gradient. grad layout matches the differentiated
/// input (embeddings / probabilities / logits / heights). degenerate flags
/// the unweighted-BCE fallback when a class is empty.
struct LossResult {
  double value = 0.0;
  std::vector<double> grad;
  bool degenerate = false;
};

/// Variance-style pull toward per-instance embedding means:
/// (1/C) sum_c (1/N_c) sum_i max(0, ||mu_c - x_i|| - delta_pull)^2.
/// Gradient is w.r.t. every embedding entry (background entries get zero).
/// Throws NoForeground when no instance exists.
LossResult pull_loss(const EmbeddingField& field, double delta_pull);

/// Separation between instance means over ordered pairs:
/// 1/(C(C-1)) sum_{a != b} max(0, delta_push - ||mu_a - mu_b||)^2.
/// Zero (with zero gradient) when fewer than two instances exist.
LossResult push_loss(const EmbeddingField& field, double delta_push);

double embed_loss(const EmbeddingField& field, double lambda_pull, double lambda_push,
                  double delta_pull, double delta_push);

/// Binary cross-entropy with inverse class weighting
/// (w_fg = N/(2*N_fg), w_bg = N/(2*N_bg)), averaged over all elements.
/// Probabilities are clamped to [eps, 1-eps], eps = 1e-7. When one class is
/// empty the weights are undefined; falls back to unweighted BCE and sets
/// degenerate.
LossResult weighted_bce(std::span<const double> conf, std::span<const std::uint8_t> gt_mask);

/// Foreground-masked MSE on sigmoided offset logits:
/// sum_fg (sigmoid(logit_i) - gt_i)^2. Gradient w.r.t. the logits.
LossResult offset_loss(std::span<const double> offset_logits, std::span<const double> gt_offset,
                       std::span<const std::uint8_t> seg_mask);

/// Foreground-masked MSE on heights: sum_fg (h_pred_i - h_gt_i)^2.
LossResult height_loss(std::span<const double> height, std::span<const double> gt_height,
                       std::span<const std::uint8_t> seg_mask);

/// L_2D = lambda_pull L_pull + lambda_push L_push + lambda_seg L_seg.
double total_2d_loss(const EmbeddingField& field, std::span<const double> conf,
                     std::span<const std::uint8_t> gt_mask, const LossParams& params);

/// L_3D = embed + lambda_seg L_seg + lambda_offset L_offset + lambda_height L_height.
double total_3d_loss(const EmbeddingField& field, std::span<const double> conf,
                     std::span<const double> offset_logits, std::span<const double> height,
                     std::span<const std::uint8_t> gt_mask, std::span<const double> gt_offset,
                     std::span<const double> gt_height, const LossParams& params);

double sigmoid(double x);

}  // namespace clf::heads
