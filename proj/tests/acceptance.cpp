// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any criterion fails. Criterion numbers given as arguments select a subset.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gendec/corpus.hpp"
#include "gendec/error.hpp"
#include "gendec/eval.hpp"
#include "gendec/models.hpp"
#include "gendec/translit.hpp"
#include "gendec/utf8.hpp"
#include "gendec/vectorize.hpp"

using namespace gendec;
namespace fs = std::filesystem;

namespace {

constexpr auto F = Gender::kFemale;
constexpr auto M = Gender::kMale;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- Full corpus -----------------------------------------------------

struct CorpusRuns {
  std::vector<NameRecord> corpus;
  DatasetSplits splits;
  std::map<CellKey, EvalReport> reports;
  double cell_seconds = 0.0;

  const EvalReport& cell(ModelKind model, Weighting weighting, InputVariant variant, NamePart part) {
    const CellKey key{model, weighting, variant, part};
    if (auto it = reports.find(key); it != reports.end()) return it->second;
    CellSpec spec{key,
                  {TokenizerConfig::words(), TokenizerConfig::char_ngrams(2, 4), TokenizerConfig::char_ngrams(4, 6)},
                  {}};
    const auto start = std::chrono::steady_clock::now();
    auto report = run_cell(spec, splits, 42).report;
    const double elapsed = seconds_since(start);
    cell_seconds += elapsed;
    std::cerr << fmt("  %-28s macro F1 %.4f  (val %.4f, %s %d-%d, fallback %.3f, %.1fs)\n", to_string(key).c_str(),
                     report.f1.macro, report.validation_macro_f1.value_or(0.0),
                     std::string(to_string(report.tokenizer.mode)).c_str(), report.tokenizer.ngram_min,
                     report.tokenizer.ngram_max, report.fallback_rate, elapsed);
    return reports.emplace(key, std::move(report)).first->second;
  }
};

CorpusRuns load_corpus_runs() {
  const fs::path raw(GENDEC_RAW_DATA);
  const auto given = dedupe_first_names(read_raw_names_file((raw / "given_names.csv").string()));
  const auto family = read_raw_names_file((raw / "family_names.csv").string());
  CorpusRuns data;
  data.corpus = build_dataset(given, family, {}, 42);
  data.splits = split_dataset(data.corpus, {}, 42, true);
  std::cerr << fmt("corpus: %zu rows (train %zu, val %zu, test %zu)\n", data.corpus.size(), data.splits.train.size(),
                   data.splits.val.size(), data.splits.test.size());
  return data;
}

Outcome criterion1(CorpusRuns& d) {
  const auto start = std::chrono::steady_clock::now();
  const double rf = d.cell(ModelKind::kForest, Weighting::kTfidf, InputVariant::kOriginal, NamePart::kFull).f1.macro;
  const double svm = d.cell(ModelKind::kSvm, Weighting::kCount, InputVariant::kOriginal, NamePart::kFull).f1.macro;
  const double nb =
      d.cell(ModelKind::kNaiveBayes, Weighting::kTfidf, InputVariant::kOriginal, NamePart::kFull).f1.macro;
  const double elapsed = seconds_since(start);
  return {rf >= 0.96 && svm >= 0.96 && nb >= 0.94,
          fmt("rf/tfidf %.4f (>=0.96), svm/count %.4f (>=0.96), nb/tfidf %.4f (>=0.94); %.0fs", rf, svm, nb, elapsed)};
}

Outcome criterion2(CorpusRuns& d) {
  double best = 0.0;
  std::string best_cell;
  double fallback = 0.0;
  for (const auto model : {ModelKind::kNaiveBayes, ModelKind::kLogistic, ModelKind::kTree, ModelKind::kForest,
                           ModelKind::kSvm}) {
    for (const auto weighting : {Weighting::kCount, Weighting::kTfidf}) {
      const auto& r = d.cell(model, weighting, InputVariant::kConverted, NamePart::kFull);
      fallback = r.fallback_rate;
      if (r.f1.macro > best) {
        best = r.f1.macro;
        best_cell = to_string(r.cell);
      }
    }
  }
  return {best >= 0.80, fmt("best converted cell %s %.4f (>=0.80); %.1f%% of test names kept original romaji for "
                            "some part (kanji unseen in training)",
                            best_cell.c_str(), best, 100.0 * fallback)};
}

Outcome criterion3(CorpusRuns& d) {
  bool pass = true;
  std::string detail;
  for (const auto& [model, weighting] : {std::pair{ModelKind::kForest, Weighting::kTfidf},
                                         std::pair{ModelKind::kSvm, Weighting::kCount}}) {
    for (const auto variant : {InputVariant::kOriginal, InputVariant::kConverted}) {
      const double full = d.cell(model, weighting, variant, NamePart::kFull).f1.macro;
      const double first = d.cell(model, weighting, variant, NamePart::kFirst).f1.macro;
      const double last = d.cell(model, weighting, variant, NamePart::kLast).f1.macro;
      pass = pass && std::abs(first - full) <= 0.015 && last <= 0.55;
      if (!detail.empty()) detail += "; ";
      detail += fmt("%s/%s/%s full %.4f first %.4f last %.4f", std::string(to_string(model)).c_str(),
                    std::string(to_string(weighting)).c_str(), std::string(to_string(variant)).c_str(), full, first,
                    last);
    }
  }
  return {pass, detail + " (|first-full| <= 0.015, last <= 0.55)"};
}

Outcome criterion4(const CorpusRuns& d) {
  const double male = 100.0 * male_fraction(d.corpus);
  const bool balanced = std::abs(male - 49.84) <= 1.5;

  const auto hist = homonym_stats(d.corpus);
  std::size_t names = 0, below = 0;
  for (const auto g : kGenders) {
    for (const auto& [spellings, count] : hist.of(g)) {
      names += count;
      if (spellings < 20) below += count;
    }
  }
  const double concentration = names ? static_cast<double>(below) / static_cast<double>(names) : 0.0;
  const bool homonyms = concentration >= 0.9;

  constexpr std::size_t kTop = 20;
  const auto has_top = [&](Gender g, std::initializer_list<const char*> wanted, std::string& ranks) {
    const auto freq = char_frequency(d.corpus, g, NamePart::kFirst);
    bool all = true;
    for (const char* ch : wanted) {
      const auto it = std::find_if(freq.begin(), freq.end(), [&](const auto& e) { return e.first == ch; });
      const auto rank = static_cast<std::size_t>(it - freq.begin()) + 1;
      all = all && it != freq.end() && rank <= kTop;
      ranks += fmt(" %s#%zu", ch, rank);
    }
    return all;
  };
  std::string male_ranks, female_ranks;
  const bool male_chars = has_top(M, {"大", "雄", "紀"}, male_ranks);
  const bool female_chars = has_top(F, {"子", "美", "奈"}, female_ranks);

  return {balanced && homonyms && male_chars && female_chars,
          fmt("male share %.2f%% (target 49.84 +/- 1.5: %s); %.1f%% of romaji given names have <20 kanji spellings "
              "(>=90%%: %s); top-%zu male chars%s (%s), female chars%s (%s)",
              male, balanced ? "ok" : "MISS", 100.0 * concentration, homonyms ? "ok" : "MISS", kTop,
              male_ranks.c_str(), male_chars ? "ok" : "MISS", female_ranks.c_str(), female_chars ? "ok" : "MISS")};
}

// ---- Property criteria ------------------------------------------------------

FeatureMatrix random_counts(std::mt19937_64& gen, std::size_t rows, std::size_t cols, int max_count) {
  FeatureMatrix X;
  X.cols = cols;
  std::uniform_int_distribution<int> value(0, max_count);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (std::size_t c = 0; c < cols; ++c) {
      if (const int v = value(gen); v > 0) entries.emplace_back(static_cast<std::uint32_t>(c), v);
    }
    X.push_row(entries);
  }
  return X;
}

std::vector<Gender> random_labels(std::mt19937_64& gen, std::size_t n) {
  std::vector<Gender> y(n);
  for (auto& g : y) g = gen() % 2 ? M : F;
  return y;
}

// Multinomial NB with alpha = 1 decided in exact integer arithmetic:
// n_c * prod (cnt_c + 1)^x * (tot_other + V)^S compared across classes.
Gender exact_nb_decision(const FeatureMatrix& X, std::span<const Gender> y, const FeatureMatrix& T, std::size_t r) {
  using u128 = unsigned __int128;
  std::array<u128, 2> docs{}, total{};
  std::array<std::vector<u128>, 2> cnt{std::vector<u128>(X.cols, 0), std::vector<u128>(X.cols, 0)};
  for (std::size_t i = 0; i < X.rows; ++i) {
    const int c = index_of(y[i]);
    docs[c] += 1;
    for (std::size_t k = 0; k < X.cols; ++k) {
      const auto v = static_cast<u128>(X.at(i, k));
      cnt[c][k] += v;
      total[c] += v;
    }
  }
  if (docs[0] == 0) return M;
  if (docs[1] == 0) return F;
  std::array<u128, 2> score{docs[0], docs[1]};
  for (std::size_t k = 0; k < T.cols; ++k) {
    for (int rep = 0; rep < static_cast<int>(T.at(r, k)); ++rep) {
      for (int c = 0; c < 2; ++c) score[c] *= cnt[c][k] + 1;
      score[0] *= total[1] + X.cols;
      score[1] *= total[0] + X.cols;
    }
  }
  return score[1] > score[0] ? M : F;
}

long double nb_oracle_male_probability(const FeatureMatrix& X, std::span<const Gender> y, const FeatureMatrix& T,
                                       std::size_t r) {
  std::array<long double, 2> docs{}, total{};
  std::array<std::vector<long double>, 2> cnt{std::vector<long double>(X.cols, 0), std::vector<long double>(X.cols, 0)};
  for (std::size_t i = 0; i < X.rows; ++i) {
    const int c = index_of(y[i]);
    docs[c] += 1;
    for (std::size_t k = 0; k < X.cols; ++k) {
      cnt[c][k] += X.at(i, k);
      total[c] += X.at(i, k);
    }
  }
  std::array<long double, 2> joint{};
  for (int c = 0; c < 2; ++c) {
    joint[c] = docs[c] / static_cast<long double>(X.rows);
    for (std::size_t k = 0; k < T.cols; ++k) {
      joint[c] *= std::pow((cnt[c][k] + 1) / (total[c] + static_cast<long double>(X.cols)), T.at(r, k));
    }
  }
  return joint[1] / (joint[0] + joint[1]);
}

Outcome criterion5() {
  std::mt19937_64 gen(5);
  std::size_t instances = 0, mismatches = 0;
  double worst = 0.0;
  for (std::size_t docs = 1; docs <= 5; ++docs) {
    for (std::size_t tokens = 1; tokens <= 6; ++tokens) {
      for (std::uint64_t labels = 0; labels < (1u << docs); ++labels) {
        for (int draw = 0; draw < 30; ++draw) {
          const auto X = random_counts(gen, docs, tokens, 2);
          std::vector<Gender> y(docs);
          for (std::size_t i = 0; i < docs; ++i) y[i] = (labels >> i) & 1 ? M : F;
          const auto T = random_counts(gen, 4, tokens, 2);
          const Classifier model = train_naive_bayes(X, y, 1.0);
          const auto pred = predict(model, T);
          const auto proba = predict_proba(model, T);
          for (std::size_t r = 0; r < T.rows; ++r) {
            mismatches += pred[r] != exact_nb_decision(X, y, T, r);
            worst = std::max(worst, static_cast<double>(std::abs(proba[r][1] - nb_oracle_male_probability(X, y, T, r))));
          }
          ++instances;
        }
      }
    }
  }
  return {mismatches == 0 && worst <= 1e-12,
          fmt("%zu corpora (1-5 docs, 1-6 tokens, every labelling): %zu prediction mismatches, max |dp| %.2e",
              instances, mismatches, worst)};
}

Outcome criterion6() {
  std::mt19937_64 gen(6);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 3 + gen() % 10;
    const auto cols = 1 + gen() % 6;
    const auto X = random_counts(gen, n, cols, 3);
    const auto y = random_labels(gen, n);
    std::normal_distribution<double> normal(0.0, 0.5);
    std::vector<double> w(cols);
    for (auto& v : w) v = normal(gen);
    const double b = normal(gen);
    const double l2 = (trial % 2) ? 1e-2 : 0.0;
    const auto g = logistic_gradient(X, y, w, b, l2);
    const auto check = [&](double analytic, double numeric) {
      const double rel = std::abs(analytic - numeric) / std::max(1e-8, std::max(std::abs(analytic), std::abs(numeric)));
      worst = std::max(worst, rel);
    };
    const double h = 1e-6;
    for (std::size_t c = 0; c < cols; ++c) {
      auto hi = w, lo = w;
      hi[c] += h;
      lo[c] -= h;
      check(g.weights[c], (logistic_loss(X, y, hi, b, l2) - logistic_loss(X, y, lo, b, l2)) / (2 * h));
    }
    check(g.bias, (logistic_loss(X, y, w, b + h, l2) - logistic_loss(X, y, w, b - h, l2)) / (2 * h));
  }

  std::size_t increases = 0, runs = 0;
  for (const double lr : {0.1, 0.05, 0.01}) {
    for (int trial = 0; trial < 30; ++trial) {
      const auto n = 5 + gen() % 20;
      const auto X = random_counts(gen, n, 1 + gen() % 6, 3);
      const auto model = train_logistic(X, random_labels(gen, n), {lr, 100, 1e-4});
      for (std::size_t e = 1; e < model.training_trace.size(); ++e) {
        increases += model.training_trace[e] > model.training_trace[e - 1];
      }
      ++runs;
    }
  }
  return {worst <= 1e-5 && increases == 0,
          fmt("max relative gradient error %.2e over 100 instances (<=1e-5); %zu loss increases in %zu runs at lr "
              "<= 0.1",
              worst, increases, runs)};
}

Outcome criterion7() {
  std::mt19937_64 gen(7);
  const std::string alphabet = "aiueokstnh ";
  std::vector<std::string> docs(1000);
  for (auto& doc : docs) {
    for (auto len = 1 + gen() % 12; len > 0; --len) doc += alphabet[gen() % alphabet.size()];
  }
  std::size_t count_mismatches = 0, nonzero = 0;
  double worst_norm = 0.0;
  for (const auto config : {TokenizerConfig::words(), TokenizerConfig::char_ngrams(2, 4)}) {
    const auto vocab = fit_vocabulary(std::span(docs).first(500), config, true);
    const auto counts = transform(docs, vocab, Weighting::kCount);
    const auto tfidf = transform(docs, vocab, Weighting::kTfidf);
    for (std::size_t r = 0; r < docs.size(); ++r) {
      std::map<std::string, double> expected;
      for (const auto& t : tokenize(docs[r], config)) {
        if (std::binary_search(vocab.tokens().begin(), vocab.tokens().end(), t)) expected[t] += 1.0;
      }
      std::map<std::string, double> actual;
      const auto cols = counts.row_cols(r);
      const auto vals = counts.row_values(r);
      for (std::size_t k = 0; k < cols.size(); ++k) actual[vocab.tokens()[cols[k]]] = vals[k];
      count_mismatches += actual != expected;
      double norm_sq = 0.0;
      for (double v : tfidf.row_values(r)) norm_sq += v * v;
      if (!expected.empty()) {
        ++nonzero;
        worst_norm = std::max(worst_norm, std::abs(std::sqrt(norm_sq) - 1.0));
      }
    }
  }
  return {count_mismatches == 0 && worst_norm <= 1e-9,
          fmt("1000 random strings x 2 tokenizers: %zu count mismatches; max | ||row||-1 | %.2e over %zu nonzero rows",
              count_mismatches, worst_norm, nonzero)};
}

Outcome criterion8() {
  std::mt19937_64 gen(8);
  std::size_t differing = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 2 + gen() % 30;
    const auto cols = 1 + gen() % 8;
    const auto X = random_counts(gen, n, cols, 3);
    const auto y = random_labels(gen, n);
    const auto tree = train_tree(X, y);
    const auto forest = train_forest(X, y, {1, cols, false, gen(), {}});
    const auto test = random_counts(gen, 20, cols, 3);
    differing += predict(Classifier(tree), test) != predict(Classifier(forest), test) ||
                 predict(Classifier(tree), X) != predict(Classifier(forest), X);
  }
  return {differing == 0, fmt("%zu of 100 random matrices with differing predictions", differing)};
}

Outcome criterion9() {
  const fs::path fixtures(GENDEC_FIXTURES);
  const auto samples = read_corpus_file((fixtures / "sample_names.csv").string());
  const auto consistency = romaji_consistency(samples);
  std::ifstream in(fixtures / "hepburn.csv");
  std::string line;
  std::getline(in, line);
  std::size_t entries = 0, matches = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    ++entries;
    try {
      matches += kana_to_romaji(line.substr(0, comma)) == line.substr(comma + 1);
    } catch (const Error&) {
    }
  }
  return {consistency.matches == 6 && consistency.total == 6 && entries == 50 && matches == 50,
          fmt("sample rows %zu/%zu; Hepburn fixture %zu/%zu", consistency.matches, consistency.total, matches,
              entries)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int shell(const std::string& args) {
  const int raw = std::system((std::string(GENDEC_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome criterion10() {
  const auto dir = fs::temp_directory_path() / ("gendec_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string corpus = (fs::path(GENDEC_FIXTURES) / "corpus.csv").string();
  std::size_t commands = 0, identical = 0;
  for (const char* model : {"nb", "lr", "dt", "rf", "svm"}) {
    for (const char* features : {"count", "tfidf"}) {
      for (const char* variant : {"original", "converted"}) {
        for (const char* tokenizer : {"word", "char_ngram"}) {
          const std::string args = fmt("train --model %s --features %s --variant %s --tokenizer %s --seed 7 "
                                       "--n-trees 10 --train %s --out ",
                                       model, features, variant, tokenizer, corpus.c_str());
          const auto a = dir / "a.json", b = dir / "b.json";
          const bool ok = shell(args + a.string()) == 0 && shell(args + b.string()) == 0;
          ++commands;
          identical += ok && slurp(a) == slurp(b);
        }
      }
    }
  }
  bool splits_equal = true;
  for (const char* extra : {"", "--no-stratify"}) {
    const auto s1 = dir / "s1", s2 = dir / "s2";
    const std::string args = fmt("split --in %s --seed 13 %s --out-dir ", corpus.c_str(), extra);
    splits_equal = splits_equal && shell(args + s1.string()) == 0 && shell(args + s2.string()) == 0;
    for (const char* name : {"train.csv", "val.csv", "test.csv"}) {
      splits_equal = splits_equal && slurp(s1 / name) == slurp(s2 / name) && !slurp(s1 / name).empty();
    }
  }
  fs::remove_all(dir);
  return {identical == commands && splits_equal,
          fmt("%zu/%zu train commands byte-identical on rerun; splits identical: %s", identical, commands,
              splits_equal ? "yes" : "no")};
}

Outcome criterion11() {
  std::mt19937_64 gen(11);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = 1 + gen() % 40;
    const auto t = random_labels(gen, n);
    const auto p = random_labels(gen, n);
    const auto f1 = f1_scores(confusion(t, p));
    std::array<double, 2> expected{};
    for (const auto g : kGenders) {
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        tp += t[i] == g && p[i] == g;
        fp += t[i] != g && p[i] == g;
        fn += t[i] == g && p[i] != g;
      }
      expected[index_of(g)] = tp > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
    }
    mismatches += std::abs(f1.female - expected[0]) > 1e-12 || std::abs(f1.male - expected[1]) > 1e-12 ||
                  std::abs(f1.macro - (expected[0] + expected[1]) / 2) > 1e-12;
  }
  const auto hand = f1_scores(confusion(std::vector<Gender>{M, M, F, F}, std::vector<Gender>{M, F, F, F})).macro;
  return {mismatches == 0 && std::abs(hand - 0.7333) <= 1e-4 && std::abs(hand - 11.0 / 15.0) <= 1e-9,
          fmt("%zu mismatches over 1000 random label vectors; hand example macro F1 %.10f (11/15)", mismatches, hand)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  std::vector<std::pair<int, std::function<Outcome()>>> criteria;
  std::optional<CorpusRuns> runs;
  const auto with_corpus = [&](auto fn) {
    return [&, fn] {
      if (!runs) runs = load_corpus_runs();
      return fn(*runs);
    };
  };
  criteria.emplace_back(1, with_corpus(criterion1));
  criteria.emplace_back(2, with_corpus(criterion2));
  criteria.emplace_back(3, with_corpus(criterion3));
  criteria.emplace_back(4, with_corpus(criterion4));
  criteria.emplace_back(5, criterion5);
  criteria.emplace_back(6, criterion6);
  criteria.emplace_back(7, criterion7);
  criteria.emplace_back(8, criterion8);
  criteria.emplace_back(9, criterion9);
  criteria.emplace_back(10, criterion10);
  criteria.emplace_back(11, criterion11);

  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && !only.contains(id)) continue;
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    failures += !outcome.pass;
    std::cout << "CRITERION " << id << ": " << (outcome.pass ? "PASS" : "FAIL") << " - " << outcome.detail
              << std::endl;
  }
  if (runs) std::cout << fmt("corpus-scale cells trained in %.0fs total", runs->cell_seconds) << std::endl;
  return failures == 0 ? 0 : 1;
}
