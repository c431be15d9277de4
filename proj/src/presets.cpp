#include "admeta/presets.hpp"

namespace admeta {

namespace {

HyperParams admetas_cifar(double lr, double beta)
{
  HyperParams hp;
  hp.alpha = lr;
  hp.beta = beta;
  hp.lambda = 0.9;
  hp.k = 6;
  hp.eta_schedule = EtaSchedule::dyn08();
  hp.weight_decay = 1e-4;
  return hp;
}

HyperParams admetar(double lr, double lambda, double eps, double wd)
{
  HyperParams hp;
  hp.alpha = lr;
  hp.lambda = lambda;
  hp.beta1 = 0.9;
  hp.beta2 = 0.999;
  hp.epsilon = eps;
  hp.k = 6;
  hp.eta_schedule = EtaSchedule::dyn08();
  hp.weight_decay = wd;
  return hp;
}

HyperParams baseline(double lr, double beta, double eps, bool nesterov)
{
  HyperParams hp;
  hp.alpha = lr;
  hp.beta = beta;
  hp.beta1 = 0.9;
  hp.beta2 = 0.999;
  hp.epsilon = eps;
  hp.nesterov = nesterov;
  hp.weight_decay = 1e-4;
  return hp;
}

std::vector<Preset> build()
{
  std::vector<Preset> p;
  auto                S = OptimizerKind::AdmetaS;
  auto                R = OptimizerKind::AdmetaR;

  // CIFAR (milestone decay by 0.1 after epochs 80 and 120 in the original
  // runs; pass --lr-schedule milestone:<steps>:0.1 to reproduce it).
  p.push_back({"admetas-cifar10-resnet", S, admetas_cifar(0.05, 0.2), "CIFAR-10 / ResNet-110"});
  p.push_back({"admetas-cifar100-resnet", S, admetas_cifar(0.05, 0.1), "CIFAR-100 / ResNet-110"});
  p.push_back({"admetas-cifar10-pyramidnet", S, admetas_cifar(0.05, 0.4), "CIFAR-10 / PyramidNet"});
  p.push_back({"admetas-cifar100-pyramidnet", S, admetas_cifar(0.05, 0.1), "CIFAR-100 / PyramidNet"});
  p.push_back({"admetar-cifar10-resnet", R, admetar(0.05, 0.1, 1e-9, 1e-4), "CIFAR-10 / ResNet-110"});
  p.push_back({"admetar-cifar100-resnet", R, admetar(0.05, 0.05, 1e-9, 1e-4), "CIFAR-100 / ResNet-110"});
  p.push_back({"admetar-cifar10-pyramidnet", R, admetar(0.01, 0.1, 1e-9, 1e-4), "CIFAR-10 / PyramidNet"});
  p.push_back({"admetar-cifar100-pyramidnet", R, admetar(0.01, 0.1, 1e-9, 1e-4), "CIFAR-100 / PyramidNet"});

  p.push_back({"sgd-cifar10-resnet", OptimizerKind::SGD, baseline(0.1, 0.0, 1e-9, false), "CIFAR-10 / ResNet-110"});
  p.push_back({"sgdm-cifar10-resnet", OptimizerKind::SGDM, baseline(0.1, 0.9, 1e-9, true), "CIFAR-10 / ResNet-110"});
  p.push_back({"adam-cifar10-resnet", OptimizerKind::Adam, baseline(0.001, 0.9, 1e-9, false),
               "CIFAR-10 / ResNet-110"});
  p.push_back({"radam-cifar10-resnet", OptimizerKind::RAdam, baseline(0.01, 0.9, 1e-9, false),
               "CIFAR-10 / ResNet-110"});

  // GLUE, BERT-base and BERT-large: (lr, lambda) per task.
  struct Glue
  {
    char const *task;
    double      base_lr, base_lambda, large_lr, large_lambda;
  };
  Glue const glue[] = {
    {"mnli", 1.5e-4, 0.08, 1.5e-4, 0.08}, {"qqp", 1e-4, 0.36, 8e-5, 0.2},     {"qnli", 2e-4, 0.03, 8e-5, 0.03},
    {"sst2", 1e-4, 0.03, 9e-5, 0.3},      {"cola", 7e-4, 0.02, 7e-4, 0.02},   {"stsb", 1e-3, 0.08, 1e-3, 0.03},
    {"mrpc", 1.2e-3, 0.3, 6e-4, 0.08},    {"rte", 1.8e-3, 0.36, 8e-4, 0.1},
  };
  for (auto const &g : glue) {
    p.push_back({std::string("admetar-glue-") + g.task + "-base", R, admetar(g.base_lr, g.base_lambda, 1e-8, 0.0),
                 std::string("GLUE ") + g.task + " / BERT-base"});
    p.push_back({std::string("admetar-glue-") + g.task + "-large", R,
                 admetar(g.large_lr, g.large_lambda, 1e-8, 0.0), std::string("GLUE ") + g.task + " / BERT-large"});
  }

  p.push_back({"admetar-squad11-base", R, admetar(4e-4, 0.05, 1e-8, 0.0), "SQuAD v1.1 / BERT-base"});
  p.push_back({"admetar-squad11-large", R, admetar(4e-4, 0.05, 1e-8, 0.0), "SQuAD v1.1 / BERT-large"});
  p.push_back({"admetar-squad20-base", R, admetar(3e-4, 0.2, 1e-8, 0.0), "SQuAD v2.0 / BERT-base"});
  p.push_back({"admetar-squad20-large", R, admetar(3e-4, 0.2, 1e-8, 0.0), "SQuAD v2.0 / BERT-large"});
  p.push_back({"admetar-ner-base", R, admetar(2e-4, 0.3, 1e-8, 0.0), "NER-CoNLL03 / BERT-base"});
  p.push_back({"admetar-ner-large", R, admetar(1.5e-4, 0.2, 1e-8, 0.0), "NER-CoNLL03 / BERT-large"});
  p.push_back({"admetar-superb", R, admetar(5e-4, 0.05, 1e-8, 0.0), "SUPERB keyword spotting / Wav2vec 2.0"});
  p.push_back({"admetar-commonlanguage", R, admetar(2e-3, 0.2, 1e-8, 0.0),
               "Common Language / Wav2vec 2.0"});
  return p;
}

} // namespace

std::vector<Preset> const &presets()
{
  static std::vector<Preset> const table = build();
  return table;
}

std::optional<Preset> find_preset(std::string const &name)
{
  for (auto const &p : presets()) {
    if (p.name == name) {
      return p;
    }
  }
  return std::nullopt;
}

} // namespace admeta
