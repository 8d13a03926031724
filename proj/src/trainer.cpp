// trainer.cpp

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

#include "anchored/pipeline/trainer.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "anchored/util/seed.hpp"

namespace anchored {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kDevStream = 2;

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

TrainingExample FromAugmented(AugmentedUtterance a) {
  return {std::move(a.seq), std::move(a.anchor)};
}

// Keeps the header and the rows whose `column` (an epoch) is before `epoch`.
std::string TruncateCsv(const fs::path& path, int column, int epoch) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot resume: missing " + path.string());
  std::string line, out;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      out += line + "\n";
      header = false;
      continue;
    }
    std::istringstream fields(line);
    std::string field;
    for (int i = 0; i <= column; ++i) std::getline(fields, field, ',');
    if (!field.empty() && std::stoi(field) < epoch) out += line + "\n";
  }
  return out;
}

template <typename Scalar>
double DevLoss(AnchoredModel<Scalar>& model, const std::vector<TrainingExample>& dev) {
  if (dev.empty()) return 0.0;
  double sum = 0;
  for (const TrainingExample& ex : dev) {
    Tape<Scalar> tape(GradMode::kDisabled);
    auto out = model.Forward(tape, ex.seq, ex.anchor);
    sum += double(RnntLoss(out.lattice, ex.seq.transcript).item());
  }
  return sum / double(dev.size());
}

template <typename Scalar>
TrainSummary TrainImpl(const ExperimentConfig& cfg, const Corpus& corpus,
                       const fs::path& dir, bool resume, std::ostream* log) {
  fs::create_directories(dir);
  const fs::path last_path = dir / "last.ckpt", best_path = dir / "best.ckpt";
  const fs::path loss_path = dir / "loss.csv", dev_path = dir / "dev.csv";
  AnchoredModel<Scalar> model(cfg.model, cfg.seeds.model);
  std::vector<Tensor<Scalar>*> params;
  for (auto& [name, t] : model.NamedParameters()) params.push_back(t);
  Adam<Scalar> adam(params, cfg.optimizer);

  TrainSummary s;
  s.best_dev_loss = std::numeric_limits<double>::infinity();
  std::string loss_rows = "step,epoch,lr,l_rnnt,l_vic,l_fr,total,grad_norm\n";
  std::string dev_rows = "epoch,step,dev_rnnt,best\n";
  if (resume) {
    const Checkpoint c = LoadCheckpoint(last_path);
    if (!c.optimizer) throw std::runtime_error(last_path.string() + " has no optimizer state");
    if (ToJson(c.config) != ToJson(cfg.model))
      throw std::runtime_error(last_path.string() + " was written for a different model config");
    RestoreParams(c, model);
    adam.Restore(*c.optimizer);
    s.epochs_completed = c.meta.at("epochs_completed");
    s.steps = c.meta.at("steps");
    s.best_dev_loss = c.meta.at("best_dev_loss");
    s.best_epoch = c.meta.at("best_epoch");
    loss_rows = TruncateCsv(loss_path, 1, s.epochs_completed);
    dev_rows = TruncateCsv(dev_path, 0, s.epochs_completed);
  }
  std::ofstream loss_csv(loss_path, std::ios::binary | std::ios::trunc);
  loss_csv << loss_rows;
  std::ofstream dev_csv(dev_path, std::ios::binary | std::ios::trunc);
  dev_csv << dev_rows;
  if (!loss_csv || !dev_csv) throw std::runtime_error("cannot write logs under " + dir.string());

  const std::vector<TrainingExample> dev = DevExamples(cfg, corpus);
  const Index batch = cfg.optimizer.batch_size;
  for (int epoch = s.epochs_completed; epoch < cfg.optimizer.epochs; ++epoch) {
    const std::vector<TrainingExample> examples = TrainingExamples(cfg, corpus, epoch);
    double epoch_loss = 0;
    Index batches = 0;
    for (size_t b = 0; b < examples.size(); b += size_t(batch)) {
      const std::vector<TrainingExample> mb(
          examples.begin() + long(b),
          examples.begin() + long(std::min(examples.size(), b + size_t(batch))));
      const double lr = adam.LearningRate();
      Tape<Scalar> tape;
      const std::string where = "at epoch " + std::to_string(epoch) + " step " +
                                std::to_string(s.steps) + "; " + last_path.string() +
                                " holds the last complete epoch";
      BatchLoss<Scalar> loss;
      try {
        loss = ComputeBatchLoss(tape, model, mb, cfg.loss_weights, cfg.objective);
      } catch (const std::domain_error& e) {
        throw NonFiniteLossError(std::string(e.what()) + " " + where);
      }
      const double total = double(loss.total.item());
      if (!std::isfinite(total)) throw NonFiniteLossError("non-finite loss " + where);
      tape.Backward(loss.total);
      const double norm = adam.Step();
      if (!std::isfinite(norm))
        throw NonFiniteLossError("non-finite gradient at step " + std::to_string(s.steps));
      ++s.steps;
      epoch_loss += total;
      ++batches;
      loss_csv << s.steps << "," << epoch << "," << Num(lr) << ","
               << Num(loss.rnnt.item()) << ","
               << (loss.vic.valid() ? Num(loss.vic.item()) : "") << ","
               << (loss.fr.valid() ? Num(loss.fr.item()) : "") << "," << Num(total) << ","
               << Num(norm) << "\n";
    }
    loss_csv.flush();
    s.final_train_loss = batches ? epoch_loss / double(batches) : 0.0;
    const double dev_loss = DevLoss(model, dev);
    const bool improved = dev_loss < s.best_dev_loss;
    s.epochs_completed = epoch + 1;
    if (improved) {
      s.best_dev_loss = dev_loss;
      s.best_epoch = epoch;
    }
    dev_csv << epoch << "," << s.steps << "," << Num(dev_loss) << "," << (improved ? 1 : 0)
            << "\n";
    dev_csv.flush();
    Checkpoint c = CaptureCheckpoint(model);
    c.meta = {{"epochs_completed", s.epochs_completed},
              {"steps", s.steps},
              {"dev_loss", dev_loss},
              {"best_dev_loss", s.best_dev_loss},
              {"best_epoch", s.best_epoch},
              {"objective", ToString(cfg.objective)}};
    if (improved) SaveCheckpoint(c, best_path);
    c.optimizer = adam.State();
    SaveCheckpoint(c, last_path);
    if (log)
      *log << "epoch " << epoch + 1 << "/" << cfg.optimizer.epochs << "  train "
           << Num(s.final_train_loss) << "  dev " << Num(dev_loss)
           << (improved ? "  (best)" : "") << std::endl;
  }
  if (cfg.optimizer.epochs == 0 || !fs::exists(best_path)) {
    Checkpoint c = CaptureCheckpoint(model);
    c.meta = {{"epochs_completed", s.epochs_completed}, {"steps", s.steps}};
    SaveCheckpoint(c, best_path);
  }
  return s;
}

}  // namespace

std::vector<TrainingExample> TrainingExamples(const ExperimentConfig& cfg,
                                              const Corpus& corpus, int epoch) {
  const std::vector<size_t> pool = corpus.Indices(Split::kTrain);
  if (pool.empty()) throw std::invalid_argument("corpus has no train utterances");
  std::vector<size_t> order = pool;
  std::mt19937_64 rng(DeriveSeed({cfg.seeds.train, kShuffleStream, std::uint64_t(epoch)}));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<TrainingExample> out;
  out.reserve(order.size());
  for (size_t idx : order)
    out.push_back(FromAugmented(
        AugmentTrainingUtterance(corpus, pool, idx, cfg.mixer, cfg.seeds.train,
                                 std::uint64_t(epoch))));
  return out;
}

std::vector<TrainingExample> DevExamples(const ExperimentConfig& cfg, const Corpus& corpus) {
  std::vector<size_t> pool = corpus.Indices(Split::kDev);
  if (cfg.optimizer.dev_utterances > 0 && Index(pool.size()) > cfg.optimizer.dev_utterances)
    pool.resize(size_t(cfg.optimizer.dev_utterances));
  std::set<int> styles;
  for (size_t idx : pool) styles.insert(corpus.utterances[idx].style);
  std::vector<TrainingExample> out;
  if (styles.size() < 2) {
    // No background of another style: the dev loss is measured on clean speech.
    for (size_t idx : pool) {
      FeatureSequence seq = ToFeatureSequence(corpus.utterances[idx]);
      AnchorSpec anchor = AnchorSpec::Mixed(seq);
      out.push_back({std::move(seq), std::move(anchor)});
    }
    return out;
  }
  const std::uint64_t seed = DeriveSeed({cfg.seeds.train, kDevStream});
  for (size_t idx : pool)
    out.push_back(FromAugmented(AugmentTrainingUtterance(corpus, pool, idx, cfg.mixer, seed, 0)));
  return out;
}

TrainSummary Train(const ExperimentConfig& cfg, const Corpus& corpus, const fs::path& dir,
                   bool resume, std::ostream* log) {
  if (cfg.model.precision == 64)
    return TrainImpl<double>(cfg, corpus, dir, resume, log);
  return TrainImpl<float>(cfg, corpus, dir, resume, log);
}

}  // namespace anchored
