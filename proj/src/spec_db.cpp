#include "nlbash/spec_db.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace nlbash {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

// 1-based column of the field with the given index.
std::size_t column_of(const std::vector<std::string_view>& fields, std::size_t index,
                      std::string_view line) {
  if (index >= fields.size()) return line.size() + 1;
  return static_cast<std::size_t>(fields[index].data() - line.data()) + 1;
}

std::optional<Arity> parse_arity(std::string_view text) {
  if (text == "none") return Arity::none;
  if (text == "required_value") return Arity::required_value;
  if (text == "optional_value") return Arity::optional_value;
  return std::nullopt;
}

std::optional<ScopeClass> parse_scope(std::string_view text) {
  if (text == "in_scope") return ScopeClass::in_scope;
  if (text == "nested_interpreter") return ScopeClass::nested_interpreter;
  if (text == "multi_statement") return ScopeClass::multi_statement;
  if (text == "out_of_scope") return ScopeClass::out_of_scope;
  return std::nullopt;
}

std::vector<std::string> split_spaces(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(sep);
    out += items[i];
  }
  return out;
}

}  // namespace

std::string_view to_string(Arity arity) {
  switch (arity) {
    case Arity::none: return "none";
    case Arity::required_value: return "required_value";
    case Arity::optional_value: return "optional_value";
  }
  return "none";
}

std::string_view to_string(ScopeClass scope) {
  switch (scope) {
    case ScopeClass::in_scope: return "in_scope";
    case ScopeClass::nested_interpreter: return "nested_interpreter";
    case ScopeClass::multi_statement: return "multi_statement";
    case ScopeClass::out_of_scope: return "out_of_scope";
  }
  return "out_of_scope";
}

int FlagSpec::value_count() const {
  if (arity == Arity::none) return 0;
  constexpr std::string_view prefix = "values:";
  if (pattern.rfind(prefix, 0) == 0) {
    int n = 1;
    const auto digits = std::string_view(pattern).substr(prefix.size());
    std::from_chars(digits.data(), digits.data() + digits.size(), n);
    return std::max(n, 1);
  }
  return 1;
}

bool UtilitySpec::has_option(std::string_view option) const {
  return std::any_of(options.begin(), options.end(), [&](const std::string& o) {
    return o == option || (o.size() > option.size() && o.compare(0, option.size(), option) == 0 &&
                            o[option.size()] == ':');
  });
}

std::optional<int> UtilitySpec::command_tail() const {
  for (const auto& o : options) {
    if (o == "command_tail") return 0;
    if (o.rfind("command_tail:", 0) == 0) return std::atoi(o.c_str() + 13);
  }
  return std::nullopt;
}

const FlagSpec* UtilitySpec::find_short(std::string_view flag) const {
  const auto it = by_short_.find(std::string(flag));
  return it == by_short_.end() ? nullptr : &flags[it->second];
}

const FlagSpec* UtilitySpec::find_long(std::string_view flag) const {
  const auto it = by_long_.find(std::string(flag));
  if (it != by_long_.end()) return &flags[it->second];
  // Long-only flags are stored in short_form.
  if (flag.rfind("--", 0) == 0) return find_short(flag);
  return nullptr;
}

const FlagSpec* UtilitySpec::find_long_prefix(std::string_view prefix) const {
  if (prefix.size() < 3 || prefix.rfind("--", 0) != 0) return nullptr;
  const FlagSpec* match = nullptr;
  for (const auto& f : flags) {
    const std::string* spelled = nullptr;
    if (f.long_form) spelled = &*f.long_form;
    else if (f.short_form.rfind("--", 0) == 0) spelled = &f.short_form;
    if (!spelled || spelled->rfind(prefix, 0) != 0) continue;
    if (match && match != &f) return nullptr;  // ambiguous
    match = &f;
  }
  return match;
}

SemanticType UtilitySpec::positional_type(std::size_t index) const {
  if (positional.empty()) return SemanticType::Unknown;
  if (index < positional.size()) return positional[index];
  return positional_repeats ? positional.back() : SemanticType::Unknown;
}

std::size_t UtilitySpec::flag_string_count() const {
  std::set<std::string> names;
  for (const auto& f : flags) {
    if (f.short_form == "-NUM") continue;  // numeric shorthand, not a man-page flag
    names.insert(f.short_form);
    if (f.long_form) names.insert(*f.long_form);
  }
  return names.size();
}

SpecDbError::SpecDbError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("spec db " + std::to_string(line) + ":" + std::to_string(column) + ": " +
                         message),
      line_(line),
      column_(column) {}

SpecDb SpecDb::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecDbError("cannot open " + path.string(), 0, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

SpecDb SpecDb::parse(std::string_view text) {
  SpecDb db;
  bool in_header = true;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      in_header = false;
      continue;
    }
    if (line.front() == '#') {
      if (in_header) db.header_.emplace_back(line);
      continue;
    }
    in_header = false;

    const auto fields = split_tabs(line);
    if (fields.size() < 5 || fields.size() > 6) {
      throw SpecDbError("expected 5 or 6 tab-separated fields, got " +
                            std::to_string(fields.size()),
                        line_no, 1);
    }
    const std::string_view name = fields[0];
    if (name.empty() || name.find('/') != std::string_view::npos) {
      throw SpecDbError("utility must be a base name", line_no, 1);
    }

    auto it = db.index_.find(std::string(name));
    if (it == db.index_.end()) {
      UtilitySpec spec;
      spec.name = std::string(name);
      db.utilities_.push_back(std::move(spec));
      it = db.index_.emplace(std::string(name), db.utilities_.size() - 1).first;
    }
    UtilitySpec& util = db.utilities_[it->second];

    const std::string_view key = fields[1];
    const std::string_view pattern = fields.size() == 6 ? fields[5] : std::string_view{};

    if (key == "@utility") {
      const auto scope = parse_scope(fields[4]);
      if (!scope) throw SpecDbError("unknown scope class", line_no, column_of(fields, 4, line));
      util.scope = *scope;
      util.options = split_spaces(pattern);
      continue;
    }
    if (key == "@positional") {
      util.positional.clear();
      util.positional_text = std::string(fields[4]);
      std::string_view sig = fields[4];
      util.positional_repeats = !sig.empty() && sig.back() == '*';
      if (util.positional_repeats) sig.remove_suffix(1);
      std::size_t start = 0;
      while (start <= sig.size()) {
        auto comma = sig.find(',', start);
        if (comma == std::string_view::npos) comma = sig.size();
        const auto type = parse_semantic_type(sig.substr(start, comma - start));
        if (!type) {
          throw SpecDbError("unknown type in positional signature", line_no,
                            column_of(fields, 4, line));
        }
        util.positional.push_back(*type);
        start = comma + 1;
      }
      continue;
    }
    if (key == "@dash_arg") {
      const auto type = parse_semantic_type(fields[4]);
      if (!type) throw SpecDbError("unknown value type", line_no, column_of(fields, 4, line));
      try {
        util.dash_arg = DashArgRule{*type, std::string(pattern), std::regex(std::string(pattern))};
      } catch (const std::regex_error&) {
        throw SpecDbError("invalid dash_arg regex", line_no, column_of(fields, 5, line));
      }
      continue;
    }
    if (key.empty() || key.front() != '-') {
      throw SpecDbError("flag must begin with \"-\"", line_no, column_of(fields, 1, line));
    }

    FlagSpec flag;
    flag.short_form = std::string(key);
    if (fields[2] != "-") {
      if (fields[2].rfind("--", 0) != 0) {
        throw SpecDbError("long flag must begin with \"--\"", line_no, column_of(fields, 2, line));
      }
      flag.long_form = std::string(fields[2]);
    }
    if (fields[3].empty() || fields[3] == "?") {
      flag.arity = Arity::optional_value;
      db.warnings_.push_back("line " + std::to_string(line_no) + ": ambiguous arity for " +
                             std::string(name) + " " + flag.short_form +
                             ", defaulting to optional_value");
    } else if (const auto arity = parse_arity(fields[3])) {
      flag.arity = *arity;
    } else {
      throw SpecDbError("unknown arity", line_no, column_of(fields, 3, line));
    }
    if (fields[4] == "-") {
      flag.value_type = SemanticType::Unknown;
    } else if (const auto type = parse_semantic_type(fields[4])) {
      flag.value_type = *type;
    } else {
      throw SpecDbError("unknown value type", line_no, column_of(fields, 4, line));
    }
    flag.pattern = std::string(pattern);

    if (util.by_short_.count(flag.short_form)) {
      throw SpecDbError("duplicate entry " + util.name + " " + flag.short_form, line_no,
                        column_of(fields, 1, line));
    }
    if (flag.long_form && util.by_long_.count(*flag.long_form)) {
      throw SpecDbError("duplicate entry " + util.name + " " + *flag.long_form, line_no,
                        column_of(fields, 2, line));
    }
    util.flags.push_back(std::move(flag));
    const auto& stored = util.flags.back();
    util.by_short_.emplace(stored.short_form, util.flags.size() - 1);
    if (stored.long_form) util.by_long_.emplace(*stored.long_form, util.flags.size() - 1);
  }
  return db;
}

const SpecDb& SpecDb::bundled() {
  static const SpecDb db = load(data_dir() / "spec_db.tsv");
  return db;
}

const UtilitySpec* SpecDb::lookup(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &utilities_[it->second];
}

ValidationResult SpecDb::validate_flag(std::string_view utility, std::string_view flag) const {
  const UtilitySpec* util = lookup(utility);
  if (!util) return {ValidationResult::Kind::unknown_utility, {}};

  const FlagSpec* spec = nullptr;
  if (flag.rfind("--", 0) == 0) {
    auto name = flag;
    if (const auto eq = name.find('='); eq != std::string_view::npos) name = name.substr(0, eq);
    spec = util->find_long(name);
    if (!spec) spec = util->find_long_prefix(name);
  } else {
    spec = util->find_short(flag);
  }
  if (!spec) return {ValidationResult::Kind::unknown_flag, {}};
  return {ValidationResult::Kind::valid, spec->short_form};
}

std::size_t SpecDb::in_scope_count() const {
  return static_cast<std::size_t>(std::count_if(utilities_.begin(), utilities_.end(),
                                                [](const UtilitySpec& u) { return u.in_scope(); }));
}

std::string SpecDb::serialize() const {
  std::string out;
  for (const auto& line : header_) {
    out += line;
    out.push_back('\n');
  }
  for (const auto& u : utilities_) {
    out += u.name + "\t@utility\t-\tnone\t" + std::string(to_string(u.scope));
    if (!u.options.empty()) out += "\t" + join(u.options, ' ');
    out.push_back('\n');
    if (!u.positional.empty()) {
      out += u.name + "\t@positional\t-\tnone\t" + u.positional_text + "\n";
    }
    if (u.dash_arg) {
      out += u.name + "\t@dash_arg\t-\tnone\t" + std::string(to_string(u.dash_arg->type)) + "\t" +
             u.dash_arg->pattern + "\n";
    }
    for (const auto& f : u.flags) {
      out += u.name + "\t" + f.short_form + "\t" + (f.long_form ? *f.long_form : "-") + "\t" +
             std::string(to_string(f.arity)) + "\t" +
             (f.value_type == SemanticType::Unknown ? std::string("-")
                                                    : std::string(to_string(f.value_type)));
      if (!f.pattern.empty()) out += "\t" + f.pattern;
      out.push_back('\n');
    }
  }
  return out;
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("NLBASH_DATA_DIR"); env && *env) return env;
#ifdef NLBASH_DEFAULT_DATA_DIR
  return NLBASH_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

}  // namespace nlbash
