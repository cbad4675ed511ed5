#include "stairgen/cli_config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "stairgen/errors.hpp"

#ifndef STAIRGEN_DEFAULT_CONFIG
#define STAIRGEN_DEFAULT_CONFIG "configs/default.ini"
#endif

namespace stairgen {
namespace {

namespace pt = boost::property_tree;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t pos = s.find(sep, start);
    auto item = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.emplace_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view text, std::string_view key) {
  text = trim(text);
  Int value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidConfig(fmt::format("'{}': expected an integer, got '{}'", key, text));
  }
  return value;
}

double parse_double(std::string_view text, std::string_view key) {
  std::string s(trim(text));
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InvalidConfig(fmt::format("'{}': expected a number, got '{}'", key, text));
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view key) {
  auto t = trim(text);
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw InvalidConfig(fmt::format("'{}': expected true/false, got '{}'", key, text));
}

// Section view that remembers which keys were read so leftovers can be
// reported as typos.
class Section {
 public:
  Section(const pt::ptree& root, std::string name) : name_(std::move(name)) {
    if (auto child = root.get_child_optional(name_)) tree_ = *child;
  }

  std::optional<std::string> get(const std::string& key) {
    used_.insert(key);
    if (auto v = tree_.get_optional<std::string>(key)) return std::string(trim(*v));
    return std::nullopt;
  }
  std::string qualified(const std::string& key) const { return name_ + "." + key; }

  void reject_unknown() const {
    for (const auto& [key, _] : tree_) {
      if (!used_.count(key)) throw InvalidConfig(fmt::format("unknown config key '{}.{}'", name_, key));
    }
  }

 private:
  std::string name_;
  pt::ptree tree_;
  std::set<std::string> used_;
};

std::string read_text_file(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidConfig(fmt::format("{} '{}' does not exist or is not readable", what, path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelSpec read_model(Section& s, const std::filesystem::path& base_dir, bool is_draft) {
  ModelSpec m;
  auto kind = s.get("kind");
  if (!kind) throw InvalidConfig(fmt::format("'{}' is required", s.qualified("kind")));
  m.kind = parse_model_kind(*kind);
  if (auto v = s.get("seed")) m.seed = parse_int<std::uint64_t>(*v, s.qualified("seed"));
  if (auto v = s.get("context_window")) m.context_window = parse_int<std::size_t>(*v, s.qualified("context_window"));
  if (auto v = s.get("eos_bias")) m.eos_bias = parse_double(*v, s.qualified("eos_bias"));
  if (auto v = s.get("vocab_size")) m.vocab_size = parse_int<std::size_t>(*v, s.qualified("vocab_size"));
  if (auto v = s.get("tokenizer")) m.tokenizer = parse_tokenizer_mode(*v);
  if (auto v = s.get("order")) m.order = parse_int<std::size_t>(*v, s.qualified("order"));
  if (auto v = s.get("smoothing")) m.smoothing = parse_double(*v, s.qualified("smoothing"));
  if (auto v = s.get("agreement")) m.agreement = parse_double(*v, s.qualified("agreement"));

  auto corpus = s.get("corpus");
  auto vocab_corpus = s.get("vocab_corpus");
  if (corpus && vocab_corpus) {
    throw InvalidConfig(fmt::format("'{}' and '{}' are mutually exclusive", s.qualified("corpus"),
                                    s.qualified("vocab_corpus")));
  }
  if (auto path = corpus ? corpus : vocab_corpus) {
    std::filesystem::path p(*path);
    if (p.is_relative()) p = base_dir / p;
    m.corpus_path = *path;
    m.corpus_text = read_text_file(p, "corpus");
  }

  switch (m.kind) {
    case ModelKind::kNGram:
      if (m.corpus_text.empty() && m.corpus_path.empty()) {
        throw InvalidConfig(fmt::format("'{}' is required for ngram models", s.qualified("corpus")));
      }
      break;
    case ModelKind::kHash:
      if (m.corpus_path.empty() && m.vocab_size == 0) {
        throw InvalidConfig(fmt::format("hash model needs '{}' or '{}'", s.qualified("vocab_size"),
                                        s.qualified("vocab_corpus")));
      }
      break;
    case ModelKind::kAgreement:
      if (!is_draft) throw InvalidConfig("the target model cannot be an agreement draft");
      break;
  }
  return m;
}

}  // namespace

std::vector<int> parse_batch_sizes(std::string_view text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int<int>(item, "plan.batch_sizes"));
      continue;
    }
    int lo = parse_int<int>(std::string_view(item).substr(0, dots), "plan.batch_sizes");
    int hi = parse_int<int>(std::string_view(item).substr(dots + 2), "plan.batch_sizes");
    if (hi < lo) throw InvalidConfig(fmt::format("batch size range '{}' is empty", item));
    for (int b = lo; b <= hi; ++b) out.push_back(b);
  }
  return out;
}

std::filesystem::path resolve_config_path(const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') return env;
  return STAIRGEN_DEFAULT_CONFIG;
}

CliConfig load_config(const std::filesystem::path& path, const CliOverrides& overrides) {
  pt::ptree root;
  {
    std::ifstream in(path);
    if (!in) throw InvalidConfig(fmt::format("config file '{}' does not exist or is not readable", path.string()));
    try {
      pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
      throw InvalidConfig(fmt::format("config file '{}': {}", path.string(), e.message()));
    }
  }
  static const std::set<std::string> kSections{"target", "draft", "plan", "latency", "output"};
  for (const auto& [name, _] : root) {
    if (!kSections.count(name)) throw InvalidConfig(fmt::format("unknown config section '[{}]'", name));
  }

  const std::filesystem::path base_dir = path.has_parent_path() ? path.parent_path() : ".";
  CliConfig cfg;
  cfg.config_path = path;
  ExperimentPlan& plan = cfg.plan;

  Section target(root, "target");
  Section draft(root, "draft");
  Section plan_s(root, "plan");
  Section latency(root, "latency");
  Section output(root, "output");

  plan.target = read_model(target, base_dir, false);
  plan.draft = read_model(draft, base_dir, true);

  if (auto v = plan_s.get("mode")) plan.mode = parse_timing_mode(*v);
  if (auto v = plan_s.get("methods")) {
    plan.methods.clear();
    for (const auto& m : split(*v, ',')) plan.methods.push_back(parse_method(m));
  }
  if (auto v = plan_s.get("batch_sizes")) plan.batch_sizes = parse_batch_sizes(*v);
  if (auto v = plan_s.get("stairs_batch_size"); v && *v != "auto") {
    plan.stairs_batch_size = parse_int<int>(*v, "plan.stairs_batch_size");
  }
  if (auto v = plan_s.get("repetitions")) plan.repetitions = parse_int<int>(*v, "plan.repetitions");
  if (auto v = plan_s.get("sweep_repetitions")) {
    plan.sweep_repetitions = parse_int<int>(*v, "plan.sweep_repetitions");
  }
  if (auto v = plan_s.get("warmup_runs")) plan.warmup_runs = parse_int<int>(*v, "plan.warmup_runs");
  if (auto v = plan_s.get("max_new_tokens")) plan.gen.max_new_tokens = parse_int<int>(*v, "plan.max_new_tokens");
  if (auto v = plan_s.get("stop_on_eos")) plan.gen.stop_on_eos = parse_bool(*v, "plan.stop_on_eos");
  if (auto v = plan_s.get("seed")) plan.seed = parse_int<std::uint64_t>(*v, "plan.seed");
  if (auto v = plan_s.get("prompts")) plan.prompt_texts = split(*v, '|');

  if (auto v = latency.get("target_base")) plan.latency.target_base = parse_double(*v, "latency.target_base");
  if (auto v = latency.get("target_per_row")) plan.latency.target_per_row = parse_double(*v, "latency.target_per_row");
  if (auto v = latency.get("draft_per_call")) plan.latency.draft_per_call = parse_double(*v, "latency.draft_per_call");

  if (auto v = output.get("dir")) cfg.out_dir = *v;
  if (auto v = output.get("formats")) cfg.formats = parse_formats(*v);

  for (const Section* s : {&target, &draft, &plan_s, &latency, &output}) s->reject_unknown();

  if (overrides.seed) plan.seed = *overrides.seed;
  if (overrides.mode) plan.mode = parse_timing_mode(*overrides.mode);
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  if (overrides.formats) cfg.formats = parse_formats(*overrides.formats);

  // Build both models now so bad parameters surface before any run starts.
  ModelPtr target_model = build_model(plan.target);
  ModelPtr draft_model = build_draft(plan.draft, target_model, 0);
  if (!(draft_model->vocabulary() == target_model->vocabulary())) {
    throw InvalidConfig("draft and target models do not share a vocabulary");
  }
  if (plan.prompt_texts.empty()) throw InvalidConfig("'plan.prompts' must name at least one prompt");
  plan.prompts.clear();
  for (const auto& text : plan.prompt_texts) plan.prompts.push_back(target_model->vocabulary().encode(text));

  plan.validate();
  return cfg;
}

}  // namespace stairgen
