#include "fgfuzz/model.hpp"

#include "fgfuzz/digest.hpp"

#include <algorithm>
#include <functional>

namespace fgfuzz {

bool Domain::covers_all(unsigned bit_width) const {
  switch (kind) {
  case Kind::Opaque: return true;
  case Kind::Range:
    if (bit_width > 64) return false;
    return lo == 0 && (bit_width == 64 ? hi == UINT64_MAX : hi == (1ull << bit_width) - 1);
  case Kind::Enumerated: {
    if (bit_width > 20) return false; // enumerations are small by construction
    std::set<uint64_t> uniq(values.begin(), values.end());
    return uniq.size() == (1ull << bit_width);
  }
  }
  return false;
}

const IdentifierDef* ProtocolModel::find_identifier(const std::string& name) const {
  for (const auto& id : identifiers)
    if (id.name == name) return &id;
  return nullptr;
}

const CommandDef* ProtocolModel::find_command(const std::string& name) const {
  for (const auto& c : commands)
    if (c.name == name) return &c;
  return nullptr;
}

const ProtectionEntry* ProtocolModel::find_protection(const std::string& identifier) const {
  for (const auto& p : protections)
    if (p.identifier == identifier) return &p;
  return nullptr;
}

const KdfRule* ProtocolModel::find_kdf_for(const std::string& output) const {
  for (const auto& k : kdfs)
    if (k.output == output) return &k;
  return nullptr;
}

const AssumptionProfile* ProtocolModel::find_profile(const std::string& name) const {
  for (const auto& p : profiles)
    if (p.name == name) return &p;
  return nullptr;
}

std::vector<const CommandDef*> ProtocolModel::commands_carrying(const std::string& identifier) const {
  std::vector<const CommandDef*> out;
  for (const auto& c : commands)
    for (const auto& f : c.fields)
      if (f == identifier) {
        out.push_back(&c);
        break;
      }
  return out;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

namespace {

void add(std::vector<Violation>& out, ViolationKind kind, const std::string& element,
         const std::string& message) {
  out.push_back(Violation{kind, element, message});
}

// Detects a cycle in the per-property protection relation (edge q -> x when q
// protects x). Returns the names on some cycle, empty if acyclic.
std::vector<std::string> find_protection_cycle(const ProtocolModel& m, Property p) {
  std::map<std::string, int> mark; // 0 unvisited, 1 in-stack, 2 done
  std::vector<std::string> stack, cycle;
  std::function<bool(const std::string&)> dfs = [&](const std::string& node) -> bool {
    mark[node] = 1;
    stack.push_back(node);
    const ProtectionEntry* e = m.find_protection(node);
    if (e) {
      for (const auto& q : e->get(p).protectors) {
        if (!m.find_identifier(q)) continue; // unresolved refs reported separately
        int s = mark.count(q) ? mark[q] : 0;
        if (s == 1) {
          auto it = std::find(stack.begin(), stack.end(), q);
          cycle.assign(it, stack.end());
          return true;
        }
        if (s == 0 && dfs(q)) return true;
      }
    }
    stack.pop_back();
    mark[node] = 2;
    return false;
  };
  for (const auto& id : m.identifiers) {
    if ((mark.count(id.name) ? mark[id.name] : 0) == 0 && dfs(id.name)) return cycle;
  }
  return {};
}

std::vector<std::string> find_kdf_cycle(const ProtocolModel& m) {
  std::map<std::string, int> mark;
  std::vector<std::string> stack, cycle;
  std::function<bool(const std::string&)> dfs = [&](const std::string& node) -> bool {
    mark[node] = 1;
    stack.push_back(node);
    const KdfRule* rule = m.find_kdf_for(node);
    if (rule) {
      for (const auto& in : rule->inputs) {
        int s = mark.count(in) ? mark[in] : 0;
        if (s == 1) {
          auto it = std::find(stack.begin(), stack.end(), in);
          cycle.assign(it, stack.end());
          return true;
        }
        if (s == 0 && dfs(in)) return true;
      }
    }
    stack.pop_back();
    mark[node] = 2;
    return false;
  };
  for (const auto& k : m.kdfs)
    if ((mark.count(k.output) ? mark[k.output] : 0) == 0 && dfs(k.output)) return cycle;
  return {};
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += v[i];
  }
  return s;
}

} // namespace

std::string to_string(ViolationKind k) {
  switch (k) {
  case ViolationKind::DuplicateName: return "duplicate-name";
  case ViolationKind::WidthViolation: return "width-violation";
  case ViolationKind::CycleViolation: return "cycle-violation";
  case ViolationKind::UnresolvedReference: return "unresolved-reference";
  case ViolationKind::PhaseOrderViolation: return "phase-order-violation";
  case ViolationKind::ProtectionCardinality: return "protection-cardinality";
  case ViolationKind::KdfViolation: return "kdf-violation";
  case ViolationKind::ProfileViolation: return "profile-violation";
  }
  return "unknown";
}

std::vector<Violation> validate(const ProtocolModel& m) {
  std::vector<Violation> out;

  // Identifier names unique; widths positive; domains fit the width.
  std::set<std::string> seen;
  for (const auto& id : m.identifiers) {
    if (!seen.insert(id.name).second)
      add(out, ViolationKind::DuplicateName, id.name, "identifier name declared more than once");
    if (id.bit_width < 1)
      add(out, ViolationKind::WidthViolation, id.name, "bit width must be at least 1");
    if (id.domain.kind == Domain::Kind::Enumerated) {
      if (id.domain.values.empty())
        add(out, ViolationKind::WidthViolation, id.name, "enumerated domain has no legal value");
      for (uint64_t v : id.domain.values)
        if (id.bit_width < 64 && (v >> id.bit_width) != 0)
          add(out, ViolationKind::WidthViolation, id.name,
              "enumerated value " + std::to_string(v) + " does not fit in " +
                  std::to_string(id.bit_width) + " bits");
    } else if (id.domain.kind == Domain::Kind::Range) {
      if (id.domain.lo > id.domain.hi)
        add(out, ViolationKind::WidthViolation, id.name, "range lo exceeds hi");
      if (id.bit_width < 64 && (id.domain.hi >> id.bit_width) != 0)
        add(out, ViolationKind::WidthViolation, id.name, "range hi does not fit the bit width");
    }
    if (!id.owner_command.empty() && !m.find_command(id.owner_command))
      add(out, ViolationKind::UnresolvedReference, id.name,
          "owner command '" + id.owner_command + "' is not defined");
  }

  // Command names unique; fields resolve; widths sum to the declared length;
  // command order consistent with phase order.
  std::set<std::string> cseen;
  int last_phase = -1;
  for (const auto& c : m.commands) {
    if (!cseen.insert(c.name).second)
      add(out, ViolationKind::DuplicateName, c.name, "command name declared more than once");
    unsigned sum = 0;
    bool resolved = true;
    for (const auto& f : c.fields) {
      const IdentifierDef* id = m.find_identifier(f);
      if (!id) {
        add(out, ViolationKind::UnresolvedReference, c.name,
            "field '" + f + "' is not a defined identifier");
        resolved = false;
      } else {
        sum += id->bit_width;
      }
    }
    if (resolved && sum != c.total_bits)
      add(out, ViolationKind::WidthViolation, c.name,
          "field widths sum to " + std::to_string(sum) + " but declared length is " +
              std::to_string(c.total_bits));
    int phase = static_cast<int>(c.phase);
    if (phase < last_phase)
      add(out, ViolationKind::PhaseOrderViolation, c.name,
          "command is listed out of phase order");
    last_phase = std::max(last_phase, phase);
  }

  // Exactly one protection entry per identifier; protector references resolve.
  std::map<std::string, int> entry_count;
  for (const auto& e : m.protections) {
    entry_count[e.identifier]++;
    if (!m.find_identifier(e.identifier))
      add(out, ViolationKind::UnresolvedReference, e.identifier,
          "protection entry for unknown identifier");
    for (Property p : kAllProperties)
      for (const auto& q : e.get(p).protectors)
        if (!m.find_identifier(q))
          add(out, ViolationKind::UnresolvedReference, e.identifier,
              "protector '" + q + "' is not a defined identifier");
  }
  for (const auto& id : m.identifiers) {
    int n = entry_count.count(id.name) ? entry_count[id.name] : 0;
    if (n != 1)
      add(out, ViolationKind::ProtectionCardinality, id.name,
          "identifier has " + std::to_string(n) + " protection entries, expected exactly 1");
  }

  // Per-property acyclicity.
  for (Property p : kAllProperties) {
    auto cycle = find_protection_cycle(m, p);
    if (!cycle.empty())
      add(out, ViolationKind::CycleViolation, cycle.front(),
          to_string(p) + " protection cycle: " + join(cycle, " -> "));
  }

  // KDF rules: output not among inputs, invertible subset, references resolve,
  // derivation relation acyclic, at most one rule per output.
  std::set<std::string> kdf_outputs;
  for (const auto& k : m.kdfs) {
    if (!kdf_outputs.insert(k.output).second)
      add(out, ViolationKind::KdfViolation, k.output, "more than one derivation rule for output");
    if (k.inputs.count(k.output))
      add(out, ViolationKind::KdfViolation, k.output, "output listed among its own inputs");
    for (const auto& in : k.invertible_inputs)
      if (!k.inputs.count(in))
        add(out, ViolationKind::KdfViolation, k.output,
            "invertible input '" + in + "' is not an input");
    if (!m.find_identifier(k.output))
      add(out, ViolationKind::UnresolvedReference, k.output, "kdf output is not defined");
    for (const auto& in : k.inputs)
      if (!m.find_identifier(in))
        add(out, ViolationKind::UnresolvedReference, k.output,
            "kdf input '" + in + "' is not defined");
  }
  auto kcycle = find_kdf_cycle(m);
  if (!kcycle.empty())
    add(out, ViolationKind::CycleViolation, kcycle.front(),
        "kdf derivation cycle: " + join(kcycle, " -> "));

  // Profiles: names unique, references resolve, at least one capability.
  std::set<std::string> pseen;
  for (const auto& p : m.profiles) {
    if (!pseen.insert(p.name).second)
      add(out, ViolationKind::DuplicateName, p.name, "profile name declared more than once");
    if (p.capabilities.empty())
      add(out, ViolationKind::ProfileViolation, p.name, "profile declares no capability");
    for (const auto& k : p.known_identifiers)
      if (!m.find_identifier(k))
        add(out, ViolationKind::UnresolvedReference, p.name,
            "known identifier '" + k + "' is not defined");
  }

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    if (a.element != b.element) return a.element < b.element;
    return a.message < b.message;
  });
  return out;
}

// ---------------------------------------------------------------------------
// apply_fortification
// ---------------------------------------------------------------------------

namespace {

ProtectionEntry& entry_for(ProtocolModel& m, const std::string& identifier) {
  for (auto& e : m.protections)
    if (e.identifier == identifier) return e;
  throw UnknownTarget("no protection entry for identifier '" + identifier + "'");
}

// Hash-representation rewrite for one user-identity identifier: the wire
// carries a fresh derived identifier <name>_Hash instead of the original,
// with a non-invertible derivation rule. Profiles that assumed knowledge of
// the original are rewritten to know only the observable hash.
void hash_identity(ProtocolModel& m, const std::string& target, bool integrity_protected) {
  const IdentifierDef* orig = m.find_identifier(target);
  if (!orig) throw UnknownTarget("fortification target '" + target + "' not in model");
  std::string hash_name = target + "_Hash";
  if (m.find_identifier(hash_name)) return; // already rewritten

  IdentifierDef hashed;
  hashed.name = hash_name;
  hashed.bit_width = orig->bit_width;
  hashed.domain = Domain::opaque();
  hashed.owner_command = orig->owner_command;
  hashed.role = SemanticRole::Config;
  m.identifiers.push_back(hashed);

  ProtectionEntry pe;
  pe.identifier = hash_name;
  if (integrity_protected) {
    // Keyed checksum on the pre-shared subscriber secret: forging the hash
    // requires the root key.
    if (!m.find_identifier("K"))
      throw UnknownTarget("model lacks root key K needed for hash integrity protection");
    pe.integrity.protectors.insert("K");
  }
  m.protections.push_back(pe);

  KdfRule rule;
  rule.output = hash_name;
  rule.inputs.insert(target);
  m.kdfs.push_back(rule);

  for (auto& c : m.commands)
    for (auto& f : c.fields)
      if (f == target) f = hash_name;

  for (auto& prof : m.profiles)
    if (prof.known_identifiers.erase(target)) prof.known_identifiers.insert(hash_name);
}

void apply_one(ProtocolModel& m, const FortificationToggle& t) {
  switch (t.kind) {
  case FortificationKind::IntegrityProtectRrcTransactionId: {
    if (!m.find_identifier("RRC-TransactionIdentifier"))
      throw UnknownTarget("model lacks RRC-TransactionIdentifier");
    if (!m.find_identifier("MAC-I")) throw UnknownTarget("model lacks MAC-I");
    entry_for(m, "RRC-TransactionIdentifier").integrity.protectors = {"MAC-I"};
    break;
  }
  case FortificationKind::HashedImsi:
  case FortificationKind::HashedImsiWithIntegrity: {
    bool with_integrity = t.kind == FortificationKind::HashedImsiWithIntegrity;
    if (!m.find_identifier("IMSI")) throw UnknownTarget("model lacks IMSI");
    // Every user-identity identifier with an unprotected wire occurrence is
    // replaced on the wire by its hash.
    std::vector<std::string> targets;
    for (const auto& id : m.identifiers) {
      if (id.role != SemanticRole::UserIdentity) continue;
      const ProtectionEntry* e = m.find_protection(id.name);
      if (!e) continue;
      if (!e->confidentiality.is_none()) continue;
      if (!m.on_wire(id.name)) continue;
      targets.push_back(id.name);
    }
    for (const auto& name : targets) hash_identity(m, name, with_integrity);
    if (with_integrity) {
      // Subsequent security-setup commands are additionally encrypted under
      // the original subscriber identity, which is no longer observable.
      for (auto& c : m.commands) {
        if (c.phase == Phase::RrcSetup) continue;
        if (c.name == "AttachRequest") continue; // carries the hash itself
        for (const auto& f : c.fields) {
          if (m.find_identifier(f) && m.find_identifier(f)->role == SemanticRole::Mac) continue;
          entry_for(m, f).confidentiality.protectors.insert("IMSI");
        }
      }
    }
    break;
  }
  case FortificationKind::AsymmetricEncryptionPreAuth: {
    if (m.commands.empty()) throw UnknownTarget("model has no commands");
    if (!m.find_identifier("PubKey_gNB")) {
      IdentifierDef pk;
      pk.name = "PubKey_gNB";
      pk.bit_width = 128;
      pk.domain = Domain::opaque();
      pk.owner_command = m.commands.front().name;
      pk.role = SemanticRole::KeyMaterial;
      m.identifiers.push_back(pk);
      ProtectionEntry pe;
      pe.identifier = "PubKey_gNB";
      m.protections.push_back(pe);
    }
    bool any = false;
    for (const auto& c : m.commands) {
      if (c.direction != Direction::Uplink) continue;
      if (c.phase != Phase::RrcSetup && c.phase != Phase::MutualAuth) continue;
      for (const auto& f : c.fields) {
        entry_for(m, f).confidentiality.protectors.insert("PubKey_gNB");
        any = true;
      }
    }
    if (!any) throw UnknownTarget("model has no pre-authentication uplink fields");
    break;
  }
  }
}

} // namespace

ProtocolModel apply_fortification(const ProtocolModel& model,
                                  const std::vector<FortificationToggle>& toggles) {
  ProtocolModel out = model;
  for (const auto& t : toggles) apply_one(out, t);
  return out;
}

// ---------------------------------------------------------------------------
// honest values
// ---------------------------------------------------------------------------

std::vector<uint8_t> honest_value_bytes(const IdentifierDef& id, uint64_t seed) {
  std::size_t nbytes = (id.bit_width + 7) / 8;
  std::vector<uint8_t> out(nbytes, 0);
  if (id.domain.kind == Domain::Kind::Opaque) {
    // Digest stream over (seed, name), truncated to the width.
    std::string label = "honest:" + id.name + ":" + std::to_string(seed);
    std::array<uint8_t, 32> block{};
    std::size_t produced = 0;
    unsigned counter = 0;
    while (produced < nbytes) {
      block = Sha256::hash(label + ":" + std::to_string(counter++));
      std::size_t take = std::min(block.size(), nbytes - produced);
      std::copy(block.begin(), block.begin() + static_cast<long>(take),
                out.begin() + static_cast<long>(produced));
      produced += take;
    }
    unsigned excess = static_cast<unsigned>(nbytes * 8 - id.bit_width);
    if (excess) out[0] &= static_cast<uint8_t>(0xff >> excess);
    return out;
  }
  uint64_t v = honest_value(id, seed);
  for (std::size_t i = 0; i < nbytes && i < 8; ++i)
    out[nbytes - 1 - i] = static_cast<uint8_t>(v >> (8 * i));
  return out;
}

uint64_t honest_value(const IdentifierDef& id, uint64_t seed) {
  switch (id.domain.kind) {
  case Domain::Kind::Enumerated: return id.domain.values.front();
  case Domain::Kind::Range: return id.domain.lo;
  case Domain::Kind::Opaque: {
    auto bytes = honest_value_bytes(id, seed);
    uint64_t v = 0;
    std::size_t start = bytes.size() > 8 ? bytes.size() - 8 : 0;
    for (std::size_t i = start; i < bytes.size(); ++i) v = (v << 8) | bytes[i];
    if (id.bit_width < 64) v &= (1ull << id.bit_width) - 1;
    return v;
  }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// enum conversions
// ---------------------------------------------------------------------------

std::string to_string(SemanticRole r) {
  switch (r) {
  case SemanticRole::UserIdentity: return "user-identity";
  case SemanticRole::Nonce: return "nonce";
  case SemanticRole::KeyMaterial: return "key-material";
  case SemanticRole::AlgorithmSelector: return "algorithm-selector";
  case SemanticRole::Mac: return "mac";
  case SemanticRole::Config: return "config";
  case SemanticRole::Spare: return "spare";
  }
  return "config";
}

std::string to_string(Layer l) {
  switch (l) {
  case Layer::RRC: return "RRC";
  case Layer::NAS: return "NAS";
  case Layer::AS: return "AS";
  }
  return "RRC";
}

std::string to_string(Direction d) { return d == Direction::Uplink ? "uplink" : "downlink"; }

std::string to_string(Phase p) {
  switch (p) {
  case Phase::RrcSetup: return "rrc-setup";
  case Phase::MutualAuth: return "mutual-auth";
  case Phase::NasSecurity: return "nas-security";
  case Phase::AsSecurity: return "as-security";
  }
  return "rrc-setup";
}

std::string to_string(Property p) {
  switch (p) {
  case Property::Confidentiality: return "confidentiality";
  case Property::Integrity: return "integrity";
  case Property::Authentication: return "authentication";
  case Property::Accounting: return "accounting";
  }
  return "confidentiality";
}

std::string to_string(Capability c) {
  switch (c) {
  case Capability::Eavesdrop: return "eavesdrop";
  case Capability::Inject: return "inject";
  case Capability::Replay: return "replay";
  case Capability::MitmRelay: return "mitm-relay";
  }
  return "eavesdrop";
}

std::string to_string(FortificationKind k) {
  switch (k) {
  case FortificationKind::IntegrityProtectRrcTransactionId: return "integrity-protect-rrc-transaction-id";
  case FortificationKind::HashedImsi: return "hashed-imsi";
  case FortificationKind::HashedImsiWithIntegrity: return "hashed-imsi-with-integrity";
  case FortificationKind::AsymmetricEncryptionPreAuth: return "asymmetric-encryption-pre-auth";
  }
  return "hashed-imsi";
}

namespace {
[[noreturn]] void bad_enum(const std::string& what, const std::string& s) {
  throw std::invalid_argument("unknown " + what + ": '" + s + "'");
}
} // namespace

SemanticRole role_from_string(const std::string& s) {
  if (s == "user-identity") return SemanticRole::UserIdentity;
  if (s == "nonce") return SemanticRole::Nonce;
  if (s == "key-material") return SemanticRole::KeyMaterial;
  if (s == "algorithm-selector") return SemanticRole::AlgorithmSelector;
  if (s == "mac") return SemanticRole::Mac;
  if (s == "config") return SemanticRole::Config;
  if (s == "spare") return SemanticRole::Spare;
  bad_enum("semantic role", s);
}

Layer layer_from_string(const std::string& s) {
  if (s == "RRC" || s == "rrc") return Layer::RRC;
  if (s == "NAS" || s == "nas") return Layer::NAS;
  if (s == "AS" || s == "as") return Layer::AS;
  bad_enum("layer", s);
}

Direction direction_from_string(const std::string& s) {
  if (s == "uplink") return Direction::Uplink;
  if (s == "downlink") return Direction::Downlink;
  bad_enum("direction", s);
}

Phase phase_from_string(const std::string& s) {
  if (s == "rrc-setup") return Phase::RrcSetup;
  if (s == "mutual-auth") return Phase::MutualAuth;
  if (s == "nas-security") return Phase::NasSecurity;
  if (s == "as-security") return Phase::AsSecurity;
  bad_enum("phase", s);
}

Capability capability_from_string(const std::string& s) {
  if (s == "eavesdrop") return Capability::Eavesdrop;
  if (s == "inject") return Capability::Inject;
  if (s == "replay") return Capability::Replay;
  if (s == "mitm-relay") return Capability::MitmRelay;
  bad_enum("capability", s);
}

FortificationKind fortification_kind_from_string(const std::string& s) {
  if (s == "integrity-protect-rrc-transaction-id") return FortificationKind::IntegrityProtectRrcTransactionId;
  if (s == "hashed-imsi") return FortificationKind::HashedImsi;
  if (s == "hashed-imsi-with-integrity") return FortificationKind::HashedImsiWithIntegrity;
  if (s == "asymmetric-encryption-pre-auth") return FortificationKind::AsymmetricEncryptionPreAuth;
  bad_enum("fortification kind", s);
}

} // namespace fgfuzz
