#include "fgfuzz/model_io.hpp"

#include "fgfuzz/digest.hpp"

#include <fstream>
#include <sstream>

namespace fgfuzz {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Cursor {
  std::string path;
  int line = 0;
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(path + ":" + std::to_string(line) + ": " + msg);
  }
};

uint64_t parse_uint(const std::string& raw, const Cursor& at) {
  std::string s = trim(raw);
  if (s.empty()) at.fail("expected a number");
  try {
    if (s.rfind("0b", 0) == 0 || s.rfind("0B", 0) == 0) {
      if (s.size() == 2) at.fail("empty binary literal");
      uint64_t v = 0;
      for (std::size_t i = 2; i < s.size(); ++i) {
        if (s[i] != '0' && s[i] != '1') at.fail("bad binary literal '" + s + "'");
        v = (v << 1) | uint64_t(s[i] - '0');
      }
      return v;
    }
    if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) return std::stoull(s.substr(2), nullptr, 16);
    return std::stoull(s, nullptr, 10);
  } catch (const std::exception&) {
    at.fail("bad number '" + s + "'");
  }
}

Protection parse_protection_cell(const std::string& value) {
  Protection p;
  std::string v = trim(value);
  if (v == "none" || v == "N" || v == "n") return p;
  for (const auto& name : split_list(v)) p.protectors.insert(name);
  return p;
}

struct Block {
  std::string section;
  int line;
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<int> entry_lines;

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }
  std::string require(const std::string& key, const Cursor& at) const {
    const std::string* v = find(key);
    if (!v) throw ParseError(at.path + ":" + std::to_string(line) + ": [" + section +
                             "] block is missing required key '" + key + "'");
    return *v;
  }
};

} // namespace

ProtocolModel parse_model(const std::string& text, const std::string& path) {
  Cursor at{path, 0};
  std::vector<Block> blocks;
  {
    std::stringstream ss(text);
    std::string raw;
    Block* current = nullptr;
    while (std::getline(ss, raw)) {
      at.line++;
      std::string line = raw;
      std::size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') at.fail("unterminated section header");
        std::string section = trim(line.substr(1, line.size() - 2));
        if (section != "identifier" && section != "command" && section != "protection" &&
            section != "kdf" && section != "profile")
          at.fail("unknown section '" + section + "'");
        blocks.push_back(Block{section, at.line, {}, {}});
        current = &blocks.back();
        continue;
      }
      std::size_t eq = line.find('=');
      if (eq == std::string::npos) at.fail("expected 'key = value'");
      if (!current) at.fail("key outside of any section");
      current->entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
      current->entry_lines.push_back(at.line);
    }
  }
  if (blocks.empty()) throw ParseError(path + ":1: empty model file");

  ProtocolModel m;
  for (const auto& b : blocks) {
    Cursor bat{path, b.line};
    try {
      if (b.section == "identifier") {
        IdentifierDef id;
        id.name = b.require("name", bat);
        id.bit_width = static_cast<unsigned>(parse_uint(b.require("bits", bat), bat));
        id.owner_command = b.require("owner", bat);
        id.role = role_from_string(b.require("role", bat));
        std::string d = b.require("domain", bat);
        if (d == "opaque") {
          id.domain = Domain::opaque();
        } else if (d.rfind("enum ", 0) == 0) {
          std::vector<uint64_t> vals;
          for (const auto& v : split_list(d.substr(5))) vals.push_back(parse_uint(v, bat));
          if (vals.empty()) bat.fail("enum domain needs at least one value");
          id.domain = Domain::enumerated(vals);
        } else if (d.rfind("range ", 0) == 0) {
          std::string spec = trim(d.substr(6));
          std::size_t dots = spec.find("..");
          if (dots == std::string::npos) bat.fail("range domain must be 'range lo..hi'");
          id.domain = Domain::range(parse_uint(spec.substr(0, dots), bat),
                                    parse_uint(spec.substr(dots + 2), bat));
        } else {
          bat.fail("unknown domain '" + d + "'");
        }
        m.identifiers.push_back(std::move(id));
      } else if (b.section == "command") {
        CommandDef c;
        c.name = b.require("name", bat);
        c.layer = layer_from_string(b.require("layer", bat));
        c.direction = direction_from_string(b.require("direction", bat));
        c.phase = phase_from_string(b.require("phase", bat));
        c.total_bits = static_cast<unsigned>(parse_uint(b.require("length", bat), bat));
        c.fields = split_list(b.require("fields", bat));
        m.commands.push_back(std::move(c));
      } else if (b.section == "protection") {
        ProtectionEntry e;
        e.identifier = b.require("identifier", bat);
        e.confidentiality = parse_protection_cell(b.require("confidentiality", bat));
        e.integrity = parse_protection_cell(b.require("integrity", bat));
        e.authentication = parse_protection_cell(b.require("authentication", bat));
        e.accounting = parse_protection_cell(b.require("accounting", bat));
        m.protections.push_back(std::move(e));
      } else if (b.section == "kdf") {
        KdfRule k;
        k.output = b.require("output", bat);
        for (const auto& in : split_list(b.require("inputs", bat))) k.inputs.insert(in);
        if (const std::string* inv = b.find("invertible"))
          for (const auto& in : split_list(*inv)) k.invertible_inputs.insert(in);
        m.kdfs.push_back(std::move(k));
      } else if (b.section == "profile") {
        AssumptionProfile p;
        p.name = b.require("name", bat);
        if (const std::string* known = b.find("known"))
          for (const auto& k : split_list(*known)) p.known_identifiers.insert(k);
        for (const auto& c : split_list(b.require("capabilities", bat)))
          p.capabilities.insert(capability_from_string(c));
        m.profiles.push_back(std::move(p));
      }
    } catch (const std::invalid_argument& e) {
      bat.fail(e.what());
    }
  }

  // Bind cross-references; unknown names are reference errors, not parse errors.
  auto check_id = [&](const std::string& name, const std::string& context) {
    if (!m.find_identifier(name))
      throw ReferenceError(path + ": unknown identifier '" + name + "' referenced by " + context);
  };
  for (const auto& id : m.identifiers)
    if (!m.find_command(id.owner_command))
      throw ReferenceError(path + ": unknown command '" + id.owner_command +
                           "' referenced as owner of identifier '" + id.name + "'");
  for (const auto& c : m.commands)
    for (const auto& f : c.fields) check_id(f, "command '" + c.name + "'");
  for (const auto& e : m.protections) {
    check_id(e.identifier, "a protection entry");
    for (Property p : kAllProperties)
      for (const auto& q : e.get(p).protectors)
        check_id(q, "the protection entry of '" + e.identifier + "'");
  }
  for (const auto& k : m.kdfs) {
    check_id(k.output, "a kdf rule");
    for (const auto& in : k.inputs) check_id(in, "the kdf rule for '" + k.output + "'");
  }
  for (const auto& p : m.profiles)
    for (const auto& k : p.known_identifiers) check_id(k, "profile '" + p.name + "'");

  return m;
}

ProtocolModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open model file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path);
}

namespace {

std::string domain_to_text(const Domain& d) {
  switch (d.kind) {
  case Domain::Kind::Opaque: return "opaque";
  case Domain::Kind::Range: return "range " + std::to_string(d.lo) + ".." + std::to_string(d.hi);
  case Domain::Kind::Enumerated: {
    std::string s = "enum ";
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(d.values[i]);
    }
    return s;
  }
  }
  return "opaque";
}

std::string join_set(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) {
    if (!out.empty()) out += ", ";
    out += x;
  }
  return out;
}

std::string cell_to_text(const Protection& p) {
  return p.is_none() ? "none" : join_set(p.protectors);
}

} // namespace

std::string save_model(const ProtocolModel& m) {
  std::ostringstream out;
  for (const auto& c : m.commands) {
    out << "[command]\n";
    out << "name = " << c.name << "\n";
    out << "layer = " << to_string(c.layer) << "\n";
    out << "direction = " << to_string(c.direction) << "\n";
    out << "phase = " << to_string(c.phase) << "\n";
    out << "length = " << c.total_bits << "\n";
    out << "fields = ";
    for (std::size_t i = 0; i < c.fields.size(); ++i) {
      if (i) out << ", ";
      out << c.fields[i];
    }
    out << "\n\n";
  }
  for (const auto& id : m.identifiers) {
    out << "[identifier]\n";
    out << "name = " << id.name << "\n";
    out << "bits = " << id.bit_width << "\n";
    out << "domain = " << domain_to_text(id.domain) << "\n";
    out << "role = " << to_string(id.role) << "\n";
    out << "owner = " << id.owner_command << "\n\n";
  }
  for (const auto& e : m.protections) {
    out << "[protection]\n";
    out << "identifier = " << e.identifier << "\n";
    out << "confidentiality = " << cell_to_text(e.confidentiality) << "\n";
    out << "integrity = " << cell_to_text(e.integrity) << "\n";
    out << "authentication = " << cell_to_text(e.authentication) << "\n";
    out << "accounting = " << cell_to_text(e.accounting) << "\n\n";
  }
  for (const auto& k : m.kdfs) {
    out << "[kdf]\n";
    out << "output = " << k.output << "\n";
    out << "inputs = " << join_set(k.inputs) << "\n";
    if (!k.invertible_inputs.empty()) out << "invertible = " << join_set(k.invertible_inputs) << "\n";
    out << "\n";
  }
  for (const auto& p : m.profiles) {
    out << "[profile]\n";
    out << "name = " << p.name << "\n";
    if (!p.known_identifiers.empty()) out << "known = " << join_set(p.known_identifiers) << "\n";
    std::string caps;
    for (Capability c : {Capability::Eavesdrop, Capability::Inject, Capability::Replay,
                         Capability::MitmRelay})
      if (p.capabilities.count(c)) {
        if (!caps.empty()) caps += ", ";
        caps += to_string(c);
      }
    out << "capabilities = " << caps << "\n\n";
  }
  return out.str();
}

void save_model_file(const ProtocolModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << save_model(model);
}

std::string model_digest(const ProtocolModel& model) {
  auto d = Sha256::hash(save_model(model));
  return hex_string(d.data(), 16);
}

} // namespace fgfuzz
