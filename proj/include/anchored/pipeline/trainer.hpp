// pipeline/trainer.hpp

// Copyright 2026  The anchored-transducer authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ANCHORED_PIPELINE_TRAINER_HPP_
#define ANCHORED_PIPELINE_TRAINER_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "anchored/anchoring/anchored_model.hpp"
#include "anchored/mixsim/mixing.hpp"
#include "anchored/pipeline/checkpoint.hpp"
#include "anchored/pipeline/experiment_config.hpp"
#include "anchored/transducer/rnnt_loss.hpp"

namespace anchored {

/// Adam over a fixed parameter list. Parameters without a gradient in a step
/// are treated as having a zero gradient.
template <typename Scalar>
class Adam {
 public:
  Adam(std::vector<Tensor<Scalar>*> params, const OptimizerConfig& cfg)
      : params_(std::move(params)), cfg_(cfg) {
    for (auto* p : params_) {
      m_.push_back(Matrix<Scalar>::Zero(p->data().rows(), p->data().cols()));
      v_.push_back(Matrix<Scalar>::Zero(p->data().rows(), p->data().cols()));
    }
  }

  /// Linear warm-up from lr / warmup to lr over the first warmup steps.
  double LearningRate() const {
    const double lr = cfg_.learning_rate;
    if (cfg_.warmup_steps <= 0) return lr;
    return lr * std::min(1.0, double(step_ + 1) / double(cfg_.warmup_steps));
  }

  double GradNorm() const {
    double sq = 0;
    for (auto* p : params_)
      if (p->has_grad()) sq += p->grad().template cast<double>().squaredNorm();
    return std::sqrt(sq);
  }

  /// Clips the global gradient norm to `grad_clip`, applies one update and
  /// clears the gradients. Returns the norm before clipping.
  double Step() {
    const double norm = GradNorm();
    const double clip = norm > cfg_.grad_clip ? cfg_.grad_clip / norm : 1.0;
    const double lr = LearningRate();
    ++step_;
    const double bc1 = 1 - std::pow(cfg_.beta1, double(step_));
    const double bc2 = 1 - std::pow(cfg_.beta2, double(step_));
    const Scalar b1 = Scalar(cfg_.beta1), b2 = Scalar(cfg_.beta2);
    const Scalar alpha = Scalar(lr / bc1);
    const Scalar inv_bc2 = Scalar(1 / bc2);
    const Scalar eps = Scalar(cfg_.epsilon);
    for (size_t i = 0; i < params_.size(); ++i) {
      Tensor<Scalar>& p = *params_[i];
      if (p.has_grad()) {
        const Matrix<Scalar> g = p.grad() * Scalar(clip);
        m_[i] = b1 * m_[i] + (Scalar(1) - b1) * g;
        v_[i] = b2 * v_[i] + (Scalar(1) - b2) * g.cwiseProduct(g);
      } else {
        m_[i] *= b1;
        v_[i] *= b2;
      }
      p.data().array() -=
          alpha * m_[i].array() / ((v_[i].array() * inv_bc2).sqrt() + eps);
      p.ZeroGrad();
    }
    return norm;
  }

  std::uint64_t step() const { return step_; }

  OptimizerState State() const {
    OptimizerState s;
    s.step = step_;
    for (size_t i = 0; i < params_.size(); ++i) {
      s.m.push_back(m_[i].template cast<float>());
      s.v.push_back(v_[i].template cast<float>());
    }
    return s;
  }

  void Restore(const OptimizerState& s) {
    if (s.m.size() != params_.size() || s.v.size() != params_.size())
      throw std::runtime_error("optimizer state has " + std::to_string(s.m.size()) +
                               " tensors, expected " + std::to_string(params_.size()));
    step_ = s.step;
    for (size_t i = 0; i < params_.size(); ++i) {
      m_[i] = s.m[i].template cast<Scalar>();
      v_[i] = s.v[i].template cast<Scalar>();
    }
  }

 private:
  std::vector<Tensor<Scalar>*> params_;
  OptimizerConfig cfg_;
  std::uint64_t step_ = 0;
  std::vector<Matrix<Scalar>> m_, v_;
};

/// One training example: the utterance as heard, its anchor and the frame
/// labels of the anchor span.
struct TrainingExample {
  FeatureSequence seq;
  AnchorSpec anchor;
};

template <typename Scalar>
struct BatchLoss {
  Var<Scalar> rnnt;   // mean over the batch
  Var<Scalar> vic;    // invalid unless the objective uses it and N >= 2
  Var<Scalar> fr;     // mean over the batch, invalid unless used
  Var<Scalar> total;
  Index vic_pairs = 0;
};

/// Builds the batch objective on `tape`. VIC uses the two halves of every
/// anchor spanning at least two encoder frames; FR reconstructs the raw
/// anchor frames from their frame labels.
template <typename Scalar>
BatchLoss<Scalar> ComputeBatchLoss(Tape<Scalar>& tape, AnchoredModel<Scalar>& model,
                                   const std::vector<TrainingExample>& batch,
                                   const LossWeights& w, ObjectiveMode mode) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  const Scalar inv_n = Scalar(1) / Scalar(batch.size());
  BatchLoss<Scalar> out;
  std::vector<Var<Scalar>> first, second;
  for (const TrainingExample& ex : batch) {
    auto fwd = model.Forward(tape, ex.seq, ex.anchor);
    Var<Scalar> l = Scale(RnntLoss(fwd.lattice, ex.seq.transcript), inv_n);
    out.rnnt = out.rnnt.valid() ? out.rnnt + l : l;
    if (UsesFr(mode)) {
      const Index tw = fwd.enc.anchor_raw.rows();
      if (Index(ex.seq.frame_labels.size()) < tw)
        throw std::invalid_argument("utterance " + ex.seq.id +
                                    " has no frame labels for its anchor");
      std::vector<int> labels(ex.seq.frame_labels.begin(),
                              ex.seq.frame_labels.begin() + tw);
      Var<Scalar> target =
          tape.Constant(Matrix<Scalar>(fwd.enc.anchor_raw.template cast<Scalar>()));
      Var<Scalar> f = Scale(
          FeatureReconstructionLoss(tape, *model.fr, labels, fwd.enc.context, target),
          inv_n);
      out.fr = out.fr.valid() ? out.fr + f : f;
    }
    if (UsesVic(mode) && fwd.enc.anchor.rows() >= 2) {
      auto [a, b] = SplitAnchorHalves(fwd.enc.anchor.rows());
      first.push_back(model.Context(tape, SliceRows(fwd.enc.anchor, a.first, a.second)));
      second.push_back(model.Context(tape, SliceRows(fwd.enc.anchor, b.first, b.second)));
    }
  }
  if (first.size() >= 2) {
    out.vic = VicLoss(tape, *model.expander, ConcatRows(first), ConcatRows(second), w).total;
    out.vic_pairs = Index(first.size());
  }
  const ObjectiveMode active =
      out.vic.valid() ? (out.fr.valid() ? ObjectiveMode::kBoth : ObjectiveMode::kVic)
                      : (out.fr.valid() ? ObjectiveMode::kFr : ObjectiveMode::kNone);
  out.total = TotalLoss(out.rnnt, out.vic, out.fr, w, active);
  return out;
}

struct TrainSummary {
  int epochs_completed = 0;
  std::uint64_t steps = 0;
  double best_dev_loss = 0;
  int best_epoch = -1;
  double final_train_loss = 0;
};

/// Thrown when a loss becomes NaN or infinite; the last complete checkpoint
/// is left in place.
class NonFiniteLossError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trains the configured model on the train split with on-the-fly mixing and
/// writes under `dir`: loss.csv (per step), dev.csv (per epoch), last.ckpt
/// (with optimizer state, every epoch) and best.ckpt (lowest dev loss). With
/// `resume`, continues from last.ckpt.
TrainSummary Train(const ExperimentConfig& cfg, const Corpus& corpus,
                   const std::filesystem::path& dir, bool resume, std::ostream* log);

/// The examples the trainer sees in one epoch, in batch order.
std::vector<TrainingExample> TrainingExamples(const ExperimentConfig& cfg,
                                              const Corpus& corpus, int epoch);
/// Fixed dev examples for the per-epoch dev loss.
std::vector<TrainingExample> DevExamples(const ExperimentConfig& cfg, const Corpus& corpus);

}  // namespace anchored

#endif  // ANCHORED_PIPELINE_TRAINER_HPP_
