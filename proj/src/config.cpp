#include "listops/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "listops/common.hpp"

namespace listops {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Shortest decimal form that parses back to the same double.
std::string fmt_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::stod(buf) == v) break;
  }
  return buf;
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long long n = std::stoll(v, &pos);
    if (pos != v.size()) raise("TypeMismatch", key);
    return n;
  } catch (const Error&) {
    throw;
  } catch (...) {
    raise("TypeMismatch", key);
  }
}

uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    uint64_t n = std::stoull(v, &pos);
    if (pos != v.size() || v.front() == '-') raise("TypeMismatch", key);
    return n;
  } catch (const Error&) {
    throw;
  } catch (...) {
    raise("TypeMismatch", key);
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) raise("TypeMismatch", key);
    return d;
  } catch (const Error&) {
    throw;
  } catch (...) {
    raise("TypeMismatch", key);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  raise("TypeMismatch", key);
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& key, const std::string& v, F one) {
  std::vector<T> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) out.push_back(one(key, tok));
  return out;
}

template <typename T, typename F>
std::string from_list(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += fmt(xs[i]);
  }
  return out;
}

// Engaged lazily so `[curriculum]` keys and overrides work in any order.
CurriculumSchedule& schedule_of(ExperimentConfig& c) {
  if (!c.schedule) c.schedule = CurriculumSchedule{};
  return *c.schedule;
}

struct KeyDef {
  const char* section;
  const char* name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

const std::vector<KeyDef>& registry() {
  static const std::vector<KeyDef> defs = {
      {"task", "ops", [](const ExperimentConfig& c) { return ops_name(c.task.ops); },
       [](ExperimentConfig& c, const std::string& v) {
         c.task.ops = v.empty() ? std::vector<OpKind>{} : parse_ops(v);
       }},
      {"task", "modulus",
       [](const ExperimentConfig& c) { return std::to_string(c.task.modulus); },
       [](ExperimentConfig& c, const std::string& v) { c.task.modulus = int(to_int("modulus", v)); }},
      {"task", "shuffle_seed",
       [](const ExperimentConfig& c) {
         return c.task.shuffle_seed ? std::to_string(*c.task.shuffle_seed) : std::string("none");
       },
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "none")
           c.task.shuffle_seed.reset();
         else
           c.task.shuffle_seed = to_u64("shuffle_seed", v);
       }},
      {"task", "max_depth",
       [](const ExperimentConfig& c) { return std::to_string(c.task.max_depth); },
       [](ExperimentConfig& c, const std::string& v) {
         c.task.max_depth = int(to_int("max_depth", v));
       }},
      {"task", "max_args",
       [](const ExperimentConfig& c) { return std::to_string(c.task.max_args); },
       [](ExperimentConfig& c, const std::string& v) { c.task.max_args = int(to_int("max_args", v)); }},
      {"task", "cot", [](const ExperimentConfig& c) { return c.task.cot ? "true" : "false"; },
       [](ExperimentConfig& c, const std::string& v) { c.task.cot = to_bool("cot", v); }},

      {"model", "n_embed",
       [](const ExperimentConfig& c) { return std::to_string(c.model.n_embed); },
       [](ExperimentConfig& c, const std::string& v) { c.model.n_embed = int(to_int("n_embed", v)); }},
      {"model", "n_head", [](const ExperimentConfig& c) { return std::to_string(c.model.n_head); },
       [](ExperimentConfig& c, const std::string& v) { c.model.n_head = int(to_int("n_head", v)); }},
      {"model", "variant",
       [](const ExperimentConfig& c) {
         return c.model.variant == Variant::Recurrent ? "recurrent" : "deep";
       },
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "recurrent")
           c.model.variant = Variant::Recurrent;
         else if (v == "deep")
           c.model.variant = Variant::Deep;
         else
           raise("TypeMismatch", "variant");
       }},
      {"model", "steps", [](const ExperimentConfig& c) { return std::to_string(c.model.steps); },
       [](ExperimentConfig& c, const std::string& v) { c.model.steps = int(to_int("steps", v)); }},
      {"model", "layers", [](const ExperimentConfig& c) { return std::to_string(c.model.layers); },
       [](ExperimentConfig& c, const std::string& v) { c.model.layers = int(to_int("layers", v)); }},
      {"model", "context",
       [](const ExperimentConfig& c) { return std::to_string(c.model.context); },
       [](ExperimentConfig& c, const std::string& v) { c.model.context = int(to_int("context", v)); }},

      {"train", "batch_size",
       [](const ExperimentConfig& c) { return std::to_string(c.train.batch_size); },
       [](ExperimentConfig& c, const std::string& v) {
         c.train.batch_size = int(to_int("batch_size", v));
       }},
      {"train", "max_iters",
       [](const ExperimentConfig& c) { return std::to_string(c.train.max_iters); },
       [](ExperimentConfig& c, const std::string& v) {
         c.train.max_iters = int(to_int("max_iters", v));
       }},
      {"train", "lr_peak", [](const ExperimentConfig& c) { return fmt_double(c.train.lr_peak); },
       [](ExperimentConfig& c, const std::string& v) { c.train.lr_peak = to_double("lr_peak", v); }},
      {"train", "lr_floor", [](const ExperimentConfig& c) { return fmt_double(c.train.lr_floor); },
       [](ExperimentConfig& c, const std::string& v) { c.train.lr_floor = to_double("lr_floor", v); }},
      {"train", "adam_beta1",
       [](const ExperimentConfig& c) { return fmt_double(c.train.adam_beta1); },
       [](ExperimentConfig& c, const std::string& v) {
         c.train.adam_beta1 = to_double("adam_beta1", v);
       }},
      {"train", "adam_beta2",
       [](const ExperimentConfig& c) { return fmt_double(c.train.adam_beta2); },
       [](ExperimentConfig& c, const std::string& v) {
         c.train.adam_beta2 = to_double("adam_beta2", v);
       }},
      {"train", "adam_eps", [](const ExperimentConfig& c) { return fmt_double(c.train.adam_eps); },
       [](ExperimentConfig& c, const std::string& v) { c.train.adam_eps = to_double("adam_eps", v); }},
      {"train", "eval_interval",
       [](const ExperimentConfig& c) { return std::to_string(c.train.eval_interval); },
       [](ExperimentConfig& c, const std::string& v) {
         c.train.eval_interval = int(to_int("eval_interval", v));
       }},
      {"train", "eval_samples",
       [](const ExperimentConfig& c) { return std::to_string(c.train.eval_samples); },
       [](ExperimentConfig& c, const std::string& v) {
         c.train.eval_samples = int(to_int("eval_samples", v));
       }},
      {"train", "final_eval_samples",
       [](const ExperimentConfig& c) { return std::to_string(c.train.final_eval_samples); },
       [](ExperimentConfig& c, const std::string& v) {
         c.train.final_eval_samples = int(to_int("final_eval_samples", v));
       }},
      {"train", "early_stop",
       [](const ExperimentConfig& c) { return c.train.early_stop ? "true" : "false"; },
       [](ExperimentConfig& c, const std::string& v) {
         c.train.early_stop = to_bool("early_stop", v);
       }},
      {"train", "early_stop_delta",
       [](const ExperimentConfig& c) { return fmt_double(c.train.early_stop_delta); },
       [](ExperimentConfig& c, const std::string& v) {
         c.train.early_stop_delta = to_double("early_stop_delta", v);
       }},
      {"train", "early_stop_patience",
       [](const ExperimentConfig& c) { return std::to_string(c.train.early_stop_patience); },
       [](ExperimentConfig& c, const std::string& v) {
         c.train.early_stop_patience = int(to_int("early_stop_patience", v));
       }},
      {"train", "early_stop_warmup",
       [](const ExperimentConfig& c) { return std::to_string(c.train.early_stop_warmup); },
       [](ExperimentConfig& c, const std::string& v) {
         c.train.early_stop_warmup = int(to_int("early_stop_warmup", v));
       }},
      {"train", "probe_batches",
       [](const ExperimentConfig& c) { return std::to_string(c.train.probe_batches); },
       [](ExperimentConfig& c, const std::string& v) {
         c.train.probe_batches = int(to_int("probe_batches", v));
       }},
      {"train", "seed", [](const ExperimentConfig& c) { return std::to_string(c.train.seed); },
       [](ExperimentConfig& c, const std::string& v) { c.train.seed = to_u64("seed", v); }},

      {"curriculum", "scaffold",
       [](const ExperimentConfig& c) { return ops_name(c.scaffold_ops); },
       [](ExperimentConfig& c, const std::string& v) {
         schedule_of(c);
         c.scaffold_ops = v.empty() ? std::vector<OpKind>{} : parse_ops(v);
       }},
      {"curriculum", "ramp_start",
       [](const ExperimentConfig& c) {
         return std::to_string(c.schedule ? c.schedule->ramp_start : CurriculumSchedule{}.ramp_start);
       },
       [](ExperimentConfig& c, const std::string& v) {
         schedule_of(c).ramp_start = int(to_int("ramp_start", v));
       }},
      {"curriculum", "ramp_end",
       [](const ExperimentConfig& c) {
         return std::to_string(c.schedule ? c.schedule->ramp_end : CurriculumSchedule{}.ramp_end);
       },
       [](ExperimentConfig& c, const std::string& v) {
         schedule_of(c).ramp_end = int(to_int("ramp_end", v));
       }},

      {"run", "out_dir", [](const ExperimentConfig& c) { return c.out_dir; },
       [](ExperimentConfig& c, const std::string& v) { c.out_dir = v; }},
      {"run", "mixes",
       [](const ExperimentConfig& c) {
         return from_list(c.mixes, [](const std::string& s) { return s; });
       },
       [](ExperimentConfig& c, const std::string& v) {
         c.mixes = to_list<std::string>("mixes", v,
                                        [](const std::string&, const std::string& t) { return t; });
       }},
      {"run", "dims",
       [](const ExperimentConfig& c) {
         return from_list(c.dims, [](int d) { return std::to_string(d); });
       },
       [](ExperimentConfig& c, const std::string& v) {
         c.dims = to_list<int>("dims", v, [](const std::string& key, const std::string& t) {
           return int(to_int(key, t));
         });
       }},
      {"run", "seeds",
       [](const ExperimentConfig& c) {
         return from_list(c.seeds, [](uint64_t s) { return std::to_string(s); });
       },
       [](ExperimentConfig& c, const std::string& v) {
         c.seeds = to_list<uint64_t>("seeds", v, [](const std::string& key, const std::string& t) {
           return to_u64(key, t);
         });
       }},
      {"run", "lines", [](const ExperimentConfig& c) { return std::to_string(c.lines); },
       [](ExperimentConfig& c, const std::string& v) { c.lines = int(to_int("lines", v)); }},
      {"run", "data_seed",
       [](const ExperimentConfig& c) { return std::to_string(c.data_seed); },
       [](ExperimentConfig& c, const std::string& v) { c.data_seed = to_u64("data_seed", v); }},
  };
  return defs;
}

const KeyDef* find_key(const std::string& section, const std::string& name) {
  for (const KeyDef& d : registry())
    if (section == d.section && name == d.name) return &d;
  return nullptr;
}

const char* kSectionOrder[] = {"task", "model", "train", "curriculum", "run"};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = t.substr(1, t.size() - 2);
      bool known = false;
      for (const char* s : kSectionOrder) known = known || section == s;
      if (!known) raise("UnknownKey", "line " + std::to_string(lineno) + ": " + t);
      if (section == "curriculum") schedule_of(cfg);
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos) raise("UnknownKey", "line " + std::to_string(lineno) + ": " + t);
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const KeyDef* def = find_key(section, key);
    if (!def) raise("UnknownKey", "line " + std::to_string(lineno) + ": " + t);
    def->set(cfg, value);
  }
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const char* section : kSectionOrder) {
    if (std::string(section) == "curriculum" && !cfg.schedule) continue;
    out += "[" + std::string(section) + "]\n";
    for (const KeyDef& d : registry())
      if (section == std::string(d.section)) out += std::string(d.name) + " = " + d.get(cfg) + "\n";
    out += "\n";
  }
  return out;
}

ExperimentConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise("IoError", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void write_config_file(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) raise("IoError", "cannot open " + path);
  out << serialize_config(cfg);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  const size_t dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    raise("UsageError", "override must look like section.key=value: " + assignment);
  const std::string section = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  const std::string value = trim(assignment.substr(eq + 1));
  const KeyDef* def = find_key(section, key);
  if (!def) raise("UnknownKey", section + "." + key);
  def->set(cfg, value);
}

}  // namespace listops
