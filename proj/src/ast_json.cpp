#include "nlbash/ast_json.hpp"

namespace nlbash {

namespace {

using nlohmann::json;

const char* joint_name(Joint j) {
  switch (j) {
    case Joint::separate: return "separate";
    case Joint::equals: return "equals";
    case Joint::attached: return "attached";
  }
  return "separate";
}

json arg_json(const Arg& arg) {
  json out{{"kind", "arg"}, {"text", arg.text}};
  if (arg.type) out["type"] = std::string(to_string(*arg.type));
  if (arg.enumerated) out["enumerated"] = true;
  if (!arg.substitutions.empty()) {
    json subs = json::array();
    for (const auto& s : arg.substitutions) subs.push_back(to_json(s));
    out["substitutions"] = std::move(subs);
    out["whole_substitution"] = arg.whole_substitution;
  }
  return out;
}

json item_json(const Item& item) {
  if (const auto* flag = std::get_if<FlagBinding>(&item)) {
    json out{{"kind", "flag"}, {"text", flag->text}, {"canonical", flag->canonical}};
    if (!flag->known) out["known"] = false;
    if (flag->bundled) out["bundled"] = true;
    if (!flag->values.empty()) {
      out["joint"] = joint_name(flag->joint);
      json values = json::array();
      for (const auto& v : flag->values) values.push_back(arg_json(v));
      out["values"] = std::move(values);
    }
    if (!flag->command.empty()) {
      out["command"] = to_json(flag->command.front());
      out["terminator"] = flag->terminator;
    }
    return out;
  }
  if (const auto* arg = std::get_if<Arg>(&item)) return arg_json(*arg);
  if (const auto* res = std::get_if<Reserved>(&item)) {
    return json{{"kind", "reserved"}, {"text", res->text}};
  }
  const auto& tail = std::get<TailCommand>(item);
  return json{{"kind", "tail"}, {"command", to_json(*tail.node)}};
}

}  // namespace

json to_json(const Node& node) {
  json out{{"kind", to_string(node.kind)}};
  switch (node.kind) {
    case NodeKind::utility: {
      out["name"] = node.name;
      if (node.unknown_utility) out["unknown_utility"] = true;
      json items = json::array();
      for (const auto& item : node.items) items.push_back(item_json(item));
      out["items"] = std::move(items);
      break;
    }
    case NodeKind::pipeline: {
      json stages = json::array();
      for (const auto& c : node.children) stages.push_back(to_json(c));
      out["stages"] = std::move(stages);
      break;
    }
    case NodeKind::logical:
      out["op"] = node.op == LogicalOp::and_op ? "&&" : "||";
      out["left"] = to_json(node.children.at(0));
      out["right"] = to_json(node.children.at(1));
      break;
    case NodeKind::group:
    case NodeKind::command_subst:
    case NodeKind::process_subst:
      out["inner"] = to_json(node.children.at(0));
      break;
  }
  return out;
}

json to_json(const ScopeViolation& v) {
  return json{{"kind", std::string(to_string(v.kind))},
              {"span", json::array({v.span.begin, v.span.end})},
              {"detail", v.detail}};
}

}  // namespace nlbash
