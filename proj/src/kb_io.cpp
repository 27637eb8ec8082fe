#include <fstream>
#include <sstream>
#include <string>

#include "derivd/kb.hpp"

namespace derivd {

namespace {

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw std::invalid_argument("kb text line " + std::to_string(line_no) + ": " + what);
}

std::uint64_t parse_uint(const std::string& token, std::size_t line_no) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
    parse_error(line_no, "expected a non-negative integer, got '" + token + "'");
  return std::stoull(token);
}

}  // namespace

std::string to_text(const KnowledgeBase& kb) {
  std::ostringstream out;
  out << "atoms " << kb.atom_count() << '\n';
  out << "seed " << kb.generation_seed() << '\n';
  out << "base";
  for (AtomId a : kb.base_facts()) out << ' ' << a;
  out << '\n';
  for (const auto& rule : kb.rules()) {
    out << "rule " << rule.id << ':';
    for (AtomId p : rule.premises) out << ' ' << p;
    out << " -> " << rule.conclusion << '\n';
  }
  return out.str();
}

KnowledgeBase kb_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> atoms;
  std::uint64_t seed = 0;
  std::vector<AtomId> base;
  std::vector<HornRule> rules;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string keyword;
    if (!(fields >> keyword) || keyword.front() == '#') continue;

    if (keyword == "atoms") {
      std::string n;
      fields >> n;
      atoms = parse_uint(n, line_no);
    } else if (keyword == "seed") {
      std::string s;
      fields >> s;
      seed = parse_uint(s, line_no);
    } else if (keyword == "base") {
      for (std::string tok; fields >> tok;) base.push_back(static_cast<AtomId>(parse_uint(tok, line_no)));
    } else if (keyword == "rule") {
      if (!atoms) parse_error(line_no, "rule before 'atoms' header");
      std::string id_token;
      fields >> id_token;
      if (id_token.empty() || id_token.back() != ':') parse_error(line_no, "expected 'rule <id>:'");
      id_token.pop_back();
      HornRule rule;
      rule.id = static_cast<RuleId>(parse_uint(id_token, line_no));
      bool arrow = false;
      for (std::string tok; fields >> tok;) {
        if (tok == "->") {
          if (arrow) parse_error(line_no, "duplicate '->'");
          arrow = true;
          std::string c;
          if (!(fields >> c)) parse_error(line_no, "missing conclusion");
          rule.conclusion = static_cast<AtomId>(parse_uint(c, line_no));
          std::string trailing;
          if (fields >> trailing) parse_error(line_no, "unexpected token after conclusion");
          break;
        }
        rule.premises.push_back(static_cast<AtomId>(parse_uint(tok, line_no)));
      }
      if (!arrow) parse_error(line_no, "missing '->'");
      rules.push_back(std::move(rule));
    } else {
      parse_error(line_no, "unknown keyword '" + keyword + "'");
    }
  }
  if (!atoms) throw std::invalid_argument("kb text: missing 'atoms' header");
  return KnowledgeBase(*atoms, std::move(base), std::move(rules), seed);
}

void save_kb(const KnowledgeBase& kb, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_text(kb);
  if (!out) throw std::runtime_error("write failed: " + path);
}

KnowledgeBase load_kb(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return kb_from_text(buf.str());
}

}  // namespace derivd
