#include <random>

#include "doctest.h"
#include "nlbash/bash_parser.hpp"
#include "test_helpers.hpp"

using namespace nlbash;

namespace {

const SpecDb& db() { return SpecDb::bundled(); }

std::vector<ViolationKind> kinds(const ParseResult& r) {
  std::vector<ViolationKind> out;
  for (const auto& v : r.violations()) out.push_back(v.kind);
  return out;
}

bool has_kind(const std::vector<ScopeViolation>& vs, ViolationKind k) {
  for (const auto& v : vs) {
    if (v.kind == k) return true;
  }
  return false;
}

const Node& child(const Node& n, std::size_t i) { return n.children.at(i); }

}  // namespace

TEST_CASE("pipeline with xargs tail command") {
  const auto r = parse_command(R"(find . -name "*.java" | xargs -I {} grep -l "TODO" {})", db());
  REQUIRE(r.ok());
  const auto& root = r.ast().root;
  CHECK(root.kind == NodeKind::pipeline);
  REQUIRE(root.children.size() == 2);
  CHECK(child(root, 0).name == "find");
  const auto& xargs = child(root, 1);
  CHECK(xargs.name == "xargs");
  REQUIRE(xargs.items.size() == 2);
  const auto& flag = std::get<FlagBinding>(xargs.items[0]);
  CHECK(flag.canonical == "-I");
  REQUIRE(flag.values.size() == 1);
  CHECK(flag.values[0].text == "{}");
  const auto& tail = std::get<TailCommand>(xargs.items[1]);
  CHECK(tail.node->name == "grep");
}

TEST_CASE("command substitution argument") {
  const auto r = parse_command("tar -cvf images.tar $(find / -type f -name *.jpg)", db());
  REQUIRE(r.ok());
  const auto& tar = r.ast().root;
  CHECK(tar.name == "tar");
  // -c -v -f images.tar, then the substitution
  REQUIRE(tar.items.size() == 4);
  const auto& f = std::get<FlagBinding>(tar.items[2]);
  CHECK(f.canonical == "-f");
  CHECK(f.bundled);
  CHECK(f.values.at(0).text == "images.tar");
  const auto& arg = std::get<Arg>(tar.items[3]);
  CHECK(arg.whole_substitution);
  REQUIRE(arg.substitutions.size() == 1);
  CHECK(arg.substitutions[0].kind == NodeKind::command_subst);
  CHECK(arg.substitutions[0].children.at(0).name == "find");
}

TEST_CASE("violations from the grammar table") {
  CHECK(kinds(parse_command("x=5 && echo done", db())) ==
        std::vector{ViolationKind::variable_assignment});
  CHECK(kinds(parse_command("sort file.txt > out.txt", db())) ==
        std::vector{ViolationKind::io_redirection});
  const auto empty = parse_command("", db());
  CHECK(!empty.ok());
  CHECK(kinds(empty) == std::vector{ViolationKind::syntax_error});
  CHECK(kinds(parse_command("   ", db())) == std::vector{ViolationKind::syntax_error});
}

TEST_CASE("all violations are reported") {
  const auto r = parse_command("x=1 sort f > out.txt; awk '{print}' f", db());
  CHECK(has_kind(r.violations(), ViolationKind::variable_assignment));
  CHECK(has_kind(r.violations(), ViolationKind::io_redirection));
  CHECK(has_kind(r.violations(), ViolationKind::compound_statement));
  CHECK(has_kind(r.violations(), ViolationKind::nested_interpreter));
  for (const auto& v : r.violations()) CHECK(v.span.end <= 37);
}

TEST_CASE("classify_scope") {
  auto c = classify_scope("awk '{print $1}' f.txt", db());
  CHECK(!c.in_scope);
  CHECK(has_kind(c.violations, ViolationKind::nested_interpreter));
  CHECK(classify_scope("find . -type f", db()).in_scope);
  c = classify_scope("alias ll='ls -l'", db());
  CHECK(!c.in_scope);
  CHECK(has_kind(c.violations, ViolationKind::multi_statement));
}

TEST_CASE("flag value forms") {
  SUBCASE("long option with equals maps to its short form") {
    const auto r = parse_command("cp -av --target-directory=/home/backup/ x", db());
    REQUIRE(r.ok());
    const auto& f = std::get<FlagBinding>(r.ast().root.items[2]);
    CHECK(f.canonical == "-t");
    CHECK(f.joint == Joint::equals);
    CHECK(f.values.at(0).text == "/home/backup/");
  }
  SUBCASE("unambiguous long prefix") {
    const auto r = parse_command("grep --ignore-c x f", db());
    REQUIRE(r.ok());
    CHECK(std::get<FlagBinding>(r.ast().root.items[0]).canonical == "-i");
  }
  SUBCASE("attached short value") {
    const auto r = parse_command("head -n5 f", db());
    REQUIRE(r.ok());
    const auto& f = std::get<FlagBinding>(r.ast().root.items[0]);
    CHECK(f.joint == Joint::attached);
    CHECK(f.values.at(0).text == "5");
  }
  SUBCASE("numeric shorthand") {
    const auto r = parse_command("tail -5", db());
    REQUIRE(r.ok());
    CHECK(std::get<FlagBinding>(r.ast().root.items[0]).canonical == "-NUM");
  }
  SUBCASE("required value may start with a dash") {
    const auto r = parse_command("find . -mtime -2", db());
    REQUIRE(r.ok());
    CHECK(std::get<FlagBinding>(r.ast().root.items[1]).values.at(0).text == "-2");
  }
  SUBCASE("find does not bundle") {
    CHECK(!parse_command("find . -nam x", db()).ok());
  }
  SUBCASE("dash argument to chmod") {
    CHECK(parse_command("chmod -x script.sh", db()).ok());
    CHECK(parse_command("chmod -R 755 dir", db()).ok());
  }
  SUBCASE("unknown flag on a known utility") {
    const auto r = parse_command("ls --frobnicate", db());
    CHECK(kinds(r) == std::vector{ViolationKind::unknown_flag});
    CHECK(parse_command("ls --frobnicate", db(), {true}).ok());
  }
  SUBCASE("unknown utility") {
    const auto r = parse_command("frobnicate -x", db());
    CHECK(kinds(r) == std::vector{ViolationKind::unknown_utility});
    const auto p = parse_command("frobnicate -x", db(), {true});
    REQUIRE(p.ok());
    CHECK(p.ast().root.unknown_utility);
  }
}

TEST_CASE("find -exec forms") {
  auto r = parse_command(R"(find . -name "*.java" -exec grep -il "TODO" {} \;)", db());
  REQUIRE(r.ok());
  const auto& exec = std::get<FlagBinding>(r.ast().root.items[2]);
  CHECK(exec.canonical == "-exec");
  REQUIRE(exec.command.size() == 1);
  CHECK(exec.command[0].name == "grep");
  CHECK(exec.terminator == "\\;");
  r = parse_command("find . -exec rm {} +", db());
  REQUIRE(r.ok());
  CHECK(std::get<FlagBinding>(r.ast().root.items[1]).terminator == "+");
  r = parse_command("find . -exec rm {}", db());
  CHECK(has_kind(r.violations(), ViolationKind::syntax_error));
}

TEST_CASE("structure") {
  auto r = parse_command("( cd /tmp && ls ) || echo no", db());
  REQUIRE(r.ok());
  const auto& root = r.ast().root;
  CHECK(root.kind == NodeKind::logical);
  CHECK(root.op == LogicalOp::or_op);
  CHECK(child(root, 0).kind == NodeKind::group);
  CHECK(child(child(root, 0), 0).kind == NodeKind::logical);
  r = parse_command("diff <(sort a) <(sort b)", db());
  REQUIRE(r.ok());
  const auto& a = std::get<Arg>(r.ast().root.items[0]);
  CHECK(a.substitutions.at(0).kind == NodeKind::process_subst);
  CHECK(!parse_command("ls |", db()).ok());
  CHECK(!parse_command("ls && ", db()).ok());
  CHECK(!parse_command("( ls", db()).ok());
  CHECK(!parse_command("echo \"abc", db()).ok());
  CHECK(!parse_command("echo $(ls", db()).ok());
}

TEST_CASE("nested violations inside substitutions") {
  const auto r = parse_command("echo $(awk '{print}' f)", db());
  CHECK(has_kind(r.violations(), ViolationKind::nested_interpreter));
  const auto q = parse_command("echo \"$(ls > f)\"", db());
  CHECK(has_kind(q.violations(), ViolationKind::io_redirection));
  CHECK(q.violations().front().span.begin == 11);
}

TEST_CASE("equals inside arguments is not an assignment") {
  CHECK(parse_command("cp --target-directory=/x a", db()).ok());
  CHECK(parse_command("echo a=b", db()).ok());
}

TEST_CASE("serialize") {
  CHECK(serialize(parse_command("find .  |   grep x", db()).ast()) == "find . | grep x");
  CHECK(serialize(parse_command("(cd a&&ls)", db()).ast()) == "( cd a && ls )");
}

TEST_CASE("paper commands parse and round trip") {
  const auto lines = testing::read_lines("commands.txt");
  REQUIRE(lines.size() >= 30);
  for (const auto& line : lines) {
    CAPTURE(line);
    const auto r = parse_command(line, db());
    for (const auto& v : r.violations()) {
      CAPTURE(v.detail);
      CHECK(false);
    }
    REQUIRE(r.ok());
    const auto text = serialize(r.ast());
    const auto again = parse_command(text, db());
    REQUIRE(again.ok());
    CHECK(again.ast() == r.ast());
    CHECK(serialize(again.ast()) == text);
  }
}

TEST_CASE("out-of-scope fixture") {
  const auto rows = testing::read_tsv_pairs("out_of_scope.tsv");
  REQUIRE(rows.size() == 50);
  for (const auto& [expected, command] : rows) {
    CAPTURE(command);
    const auto c = classify_scope(command, db());
    CHECK(!c.in_scope);
    bool found = false;
    for (const auto& v : c.violations) found |= to_string(v.kind) == expected;
    CHECK(found);
  }
}

TEST_CASE("statement-position constructs are never in scope") {
  const std::vector<std::string> heads{"ls", "find .", "grep x f", "sort -n f", "echo hi"};
  const std::vector<std::string> bad{"< f", "<< EOF", "> f", "2> f"};
  const std::vector<std::string> keywords{"if", "for", "while", "until", "case"};
  for (const auto& h : heads) {
    for (const auto& b : bad) CHECK(!classify_scope(h + " " + b, db()).in_scope);
    CHECK(!classify_scope("X=1 " + h, db()).in_scope);
    CHECK(!classify_scope("ls && X=1 " + h, db()).in_scope);
    for (const auto& k : keywords) {
      CHECK(!classify_scope(k + " " + h, db()).in_scope);
      CHECK(!classify_scope(h + " | " + k + " x", db()).in_scope);
    }
  }
}

TEST_CASE("clean_command") {
  CHECK(clean_command("$ sudo /bin/find . -type f") == "find . -type f");
  CHECK(clean_command(R"(find . -name "*.java")") == R"(find . -name "*.java")");
  CHECK(clean_command("# du -a . | sort -rh | head -n5") == "du -a . | sort -rh | head -n5");
  CHECK(clean_command("  sudo -u root -E ls /root  ") == "ls /root");
  CHECK(clean_command("ls | /usr/bin/sort") == "ls | sort");
  CHECK(clean_command("echo $(/bin/ls /bin/x)") == "echo $(ls /bin/x)");
  CHECK(clean_command("$HOME/bin/x") == "$HOME/bin/x");
  CHECK(clean_command("ls /bin/find") == "ls /bin/find");
}

TEST_CASE("clean_command is idempotent") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> parts{"$", "#", " ", "sudo", "-u", "root", "/bin/ls",
                                       "|",  "&&", "(", "$(", ")", "'a b'", "\"", "-E",
                                       "/usr/bin/find", ".", "x", "\t", "sudo -n"};
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    const int n = static_cast<int>(rng() % 8);
    for (int j = 0; j < n; ++j) {
      s += parts[rng() % parts.size()];
      if (rng() % 2) s += ' ';
    }
    const auto once = clean_command(s);
    CAPTURE(s);
    CHECK(clean_command(once) == once);
  }
}
