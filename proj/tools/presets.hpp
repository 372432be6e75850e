#pragma once

// Named hyperparameter bundles. A preset is a flat key->value map sharing the
// long-flag vocabulary of the subcommands; each subcommand picks up the keys
// it understands and ignores the rest, so one preset name can configure the
// whole pipeline (vocab -> shuffle -> train -> infer).
//
// Precedence: built-in defaults < preset < --config JSON < explicit flags.

#include <string>

#include "json.hpp"

namespace textvec::cli {

inline const nlohmann::json& preset_table() {
  static const nlohmann::json table = {
      // 20 Newsgroups: all words and bigrams predicted, 10 epochs, 50% dropout.
      {"20ng-pvdbow-300",
       {{"bigrams", true}, {"min-count", 1}, {"dim", 300}, {"binarizer", "none"},
        {"epochs", 10}, {"lr", 1.3}, {"dropout-keep", 0.5}}},
      {"20ng-binary-32",
       {{"bigrams", true}, {"min-count", 1}, {"dim", 32}, {"binarizer", "krizhevsky"},
        {"epochs", 10}, {"lr", 0.3}, {"dropout-keep", 0.5}}},
      {"20ng-binary-64",
       {{"bigrams", true}, {"min-count", 1}, {"dim", 64}, {"binarizer", "krizhevsky"},
        {"epochs", 10}, {"lr", 0.3}, {"dropout-keep", 0.5}}},
      {"20ng-binary-128",
       {{"bigrams", true}, {"min-count", 1}, {"dim", 128}, {"binarizer", "krizhevsky"},
        {"epochs", 10}, {"lr", 0.3}, {"dropout-keep", 0.5}}},
      {"20ng-realbinary-28",
       {{"bigrams", true}, {"min-count", 1}, {"dim-real", 300}, {"dim-bin", 28},
        {"binarizer", "krizhevsky"}, {"epochs", 10}, {"lr", 0.3}, {"dropout-keep", 0.5}}},
      {"20ng-pvdm-300",
       {{"min-count", 1}, {"dim-doc", 300}, {"dim-word", 300}, {"window", 1},
        {"one-sided", true}, {"binarizer", "none"}, {"epochs", 10}, {"lr", 1.2},
        {"dropout-keep", 0.5}}},
      {"20ng-pvdm-binary-32",
       {{"min-count", 1}, {"dim-doc", 32}, {"dim-word", 32}, {"window", 1},
        {"one-sided", true}, {"binarizer", "krizhevsky"}, {"epochs", 10}, {"lr", 0.2},
        {"dropout-keep", 0.5}}},

      // RCV1: one epoch suffices; vocabulary cut at 10 occurrences.
      {"rcv1-pvdbow-300",
       {{"bigrams", true}, {"min-count", 10}, {"dim", 300}, {"binarizer", "none"},
        {"epochs", 1}, {"lr", 1.1}, {"dropout-keep", 0.5}}},
      {"rcv1-binary-32",
       {{"bigrams", true}, {"min-count", 10}, {"dim", 32}, {"binarizer", "krizhevsky"},
        {"epochs", 1}, {"lr", 0.4}, {"dropout-keep", 0.7}}},
      {"rcv1-pvdm-300",
       {{"min-count", 10}, {"dim-doc", 300}, {"dim-word", 300}, {"window", 1},
        {"one-sided", true}, {"binarizer", "none"}, {"epochs", 1}, {"lr", 1.1},
        {"dropout-keep", 0.9}}},
      {"rcv1-pvdm-binary-32",
       {{"min-count", 10}, {"dim-doc", 32}, {"dim-word", 32}, {"window", 1},
        {"one-sided", true}, {"binarizer", "krizhevsky"}, {"epochs", 1}, {"lr", 0.5},
        {"dropout-keep", 0.9}}},

      // English Wikipedia: vocabulary cut at 100 occurrences. Epoch count was
      // never published for this corpus; the default (10) stands unless set.
      {"wiki-pvdbow-300",
       {{"bigrams", true}, {"min-count", 100}, {"dim", 300}, {"binarizer", "none"},
        {"lr", 1.4}, {"dropout-keep", 0.9}}},
      {"wiki-binary-32",
       {{"bigrams", true}, {"min-count", 100}, {"dim", 32}, {"binarizer", "krizhevsky"},
        {"lr", 0.9}, {"dropout-keep", 0.9}}},
      {"wiki-pvdm-300",
       {{"min-count", 100}, {"dim-doc", 300}, {"dim-word", 300}, {"window", 1},
        {"one-sided", true}, {"binarizer", "none"}, {"lr", 0.5}, {"dropout-keep", 1.0}}},
      {"wiki-pvdm-binary-32",
       {{"min-count", 100}, {"dim-doc", 32}, {"dim-word", 32}, {"window", 1},
        {"one-sided", true}, {"binarizer", "krizhevsky"}, {"lr", 0.6},
        {"dropout-keep", 1.0}}},

      // Coding-layer comparison on 20 Newsgroups, 32 bits (per-strategy tuned
      // learning rates; dropout helps only the rounded-sigmoid variant).
      {"binarize-krizhevsky",
       {{"bigrams", true}, {"min-count", 1}, {"dim", 32}, {"binarizer", "krizhevsky"},
        {"epochs", 10}, {"lr", 0.3}, {"dropout-keep", 0.5}}},
      {"binarize-gaussian",
       {{"bigrams", true}, {"min-count", 1}, {"dim", 32}, {"binarizer", "gaussian"},
        {"noise-std", 0.4}, {"epochs", 10}, {"lr", 1.0}, {"dropout-keep", 1.0}}},
      {"binarize-bsn-id",
       {{"bigrams", true}, {"min-count", 1}, {"dim", 32}, {"binarizer", "bsn-identity"},
        {"epochs", 10}, {"lr", 1.5}, {"dropout-keep", 1.0}}},
      {"binarize-bsn-id-anneal",
       {{"bigrams", true}, {"min-count", 1}, {"dim", 32}, {"binarizer", "bsn-identity"},
        {"anneal", true}, {"anneal-increment", 0.1}, {"epochs", 10}, {"lr", 1.5},
        {"dropout-keep", 1.0}}},
      {"binarize-bsn-sig",
       {{"bigrams", true}, {"min-count", 1}, {"dim", 32}, {"binarizer", "bsn-sigmoid"},
        {"epochs", 10}, {"lr", 11.0}, {"dropout-keep", 1.0}}},
      {"binarize-bsn-sig-anneal",
       {{"bigrams", true}, {"min-count", 1}, {"dim", 32}, {"binarizer", "bsn-sigmoid"},
        {"anneal", true}, {"anneal-increment", 0.1}, {"epochs", 10}, {"lr", 11.0},
        {"dropout-keep", 1.0}}},

      // Multi-sense word embeddings on Wikipedia-scale text. The window size
      // was never published; 5 is the usual skip-gram choice.
      {"dsg-50-3",
       {{"min-count", 100}, {"collapse-numbers", true}, {"window", 5}, {"senses", 3},
        {"dim", 50}}},
      {"dsg-50-5",
       {{"min-count", 100}, {"collapse-numbers", true}, {"window", 5}, {"senses", 5},
        {"dim", 50}}},
      {"dsg-300-3",
       {{"min-count", 100}, {"collapse-numbers", true}, {"window", 5}, {"senses", 3},
        {"dim", 300}}},
      {"dsg-300-5",
       {{"min-count", 100}, {"collapse-numbers", true}, {"window", 5}, {"senses", 5},
        {"dim", 300}}},
  };
  return table;
}

}  // namespace textvec::cli
