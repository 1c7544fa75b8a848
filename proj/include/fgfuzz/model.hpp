#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgfuzz {

// ---------------------------------------------------------------------------
// Declarative protocol-security model: identifiers, commands, per-property
// protections, key-derivation rules and attacker assumption profiles.
// All values are immutable after construction and safe to share across
// threads; transformations return new models.
// ---------------------------------------------------------------------------

enum class SemanticRole { UserIdentity, Nonce, KeyMaterial, AlgorithmSelector, Mac, Config, Spare };

enum class Layer { RRC, NAS, AS };
enum class Direction { Uplink, Downlink };
enum class Phase { RrcSetup, MutualAuth, NasSecurity, AsSecurity };

enum class Property { Confidentiality, Integrity, Authentication, Accounting };
inline constexpr Property kAllProperties[] = {Property::Confidentiality, Property::Integrity,
                                              Property::Authentication, Property::Accounting};

enum class Capability { Eavesdrop, Inject, Replay, MitmRelay };

// Legal-value domain of an identifier.
//  - Enumerated: explicit list of legal bit patterns.
//  - Range: [lo, hi] inclusive, unsigned.
//  - Opaque: every bit pattern of the declared width is legal.
struct Domain {
  enum class Kind { Enumerated, Range, Opaque };
  Kind kind = Kind::Opaque;
  std::vector<uint64_t> values; // Enumerated
  uint64_t lo = 0, hi = 0;      // Range

  static Domain opaque() { return Domain{}; }
  static Domain enumerated(std::vector<uint64_t> v) {
    Domain d;
    d.kind = Kind::Enumerated;
    d.values = std::move(v);
    return d;
  }
  static Domain range(uint64_t lo, uint64_t hi) {
    Domain d;
    d.kind = Kind::Range;
    d.lo = lo;
    d.hi = hi;
    return d;
  }

  bool contains(uint64_t v) const {
    switch (kind) {
    case Kind::Enumerated:
      for (uint64_t x : values)
        if (x == v) return true;
      return false;
    case Kind::Range: return v >= lo && v <= hi;
    case Kind::Opaque: return true;
    }
    return false;
  }

  // Number of legal values given the identifier's bit width (as unsigned
  // 128-bit-safe pair: callers use big integers for widths > 63).
  bool covers_all(unsigned bit_width) const;
  friend bool operator==(const Domain&, const Domain&) = default;
};

struct IdentifierDef {
  std::string name;
  unsigned bit_width = 0;
  Domain domain;
  std::string owner_command;
  SemanticRole role = SemanticRole::Config;
  friend bool operator==(const IdentifierDef&, const IdentifierDef&) = default;
};

// None is represented by an empty protector set.
struct Protection {
  std::set<std::string> protectors;
  bool is_none() const { return protectors.empty(); }
  friend bool operator==(const Protection&, const Protection&) = default;
};

struct ProtectionEntry {
  std::string identifier;
  Protection confidentiality, integrity, authentication, accounting;

  const Protection& get(Property p) const {
    switch (p) {
    case Property::Confidentiality: return confidentiality;
    case Property::Integrity: return integrity;
    case Property::Authentication: return authentication;
    case Property::Accounting: return accounting;
    }
    return confidentiality;
  }
  Protection& get(Property p) {
    return const_cast<Protection&>(static_cast<const ProtectionEntry*>(this)->get(p));
  }
  friend bool operator==(const ProtectionEntry&, const ProtectionEntry&) = default;
};

struct CommandDef {
  std::string name;
  Layer layer = Layer::RRC;
  Direction direction = Direction::Uplink;
  Phase phase = Phase::RrcSetup;
  unsigned total_bits = 0;
  std::vector<std::string> fields; // ordered; defines the wire layout
  friend bool operator==(const CommandDef&, const CommandDef&) = default;
};

struct KdfRule {
  std::string output;
  std::set<std::string> inputs;
  std::set<std::string> invertible_inputs; // recoverable from the output
  friend bool operator==(const KdfRule&, const KdfRule&) = default;
};

struct AssumptionProfile {
  std::string name;
  std::set<std::string> known_identifiers;
  std::set<Capability> capabilities;
  friend bool operator==(const AssumptionProfile&, const AssumptionProfile&) = default;
};

enum class FortificationKind {
  IntegrityProtectRrcTransactionId,
  HashedImsi,
  HashedImsiWithIntegrity,
  AsymmetricEncryptionPreAuth,
};

struct FortificationToggle {
  FortificationKind kind;
  std::map<std::string, std::string> parameters;
};

struct ProtocolModel {
  std::vector<IdentifierDef> identifiers;
  std::vector<ProtectionEntry> protections; // one per identifier
  std::vector<CommandDef> commands;         // ordered, consistent with phase order
  std::vector<KdfRule> kdfs;
  std::vector<AssumptionProfile> profiles;

  const IdentifierDef* find_identifier(const std::string& name) const;
  const CommandDef* find_command(const std::string& name) const;
  const ProtectionEntry* find_protection(const std::string& identifier) const;
  const KdfRule* find_kdf_for(const std::string& output) const;
  const AssumptionProfile* find_profile(const std::string& name) const;

  // Commands whose field list contains the identifier.
  std::vector<const CommandDef*> commands_carrying(const std::string& identifier) const;
  bool on_wire(const std::string& identifier) const { return !commands_carrying(identifier).empty(); }

  friend bool operator==(const ProtocolModel&, const ProtocolModel&) = default;
};

// ---------------------------------------------------------------------------
// Validation. Violations are data, not errors.
// ---------------------------------------------------------------------------

enum class ViolationKind {
  DuplicateName,
  WidthViolation,
  CycleViolation,
  UnresolvedReference,
  PhaseOrderViolation,
  ProtectionCardinality,
  KdfViolation,
  ProfileViolation,
};

struct Violation {
  ViolationKind kind;
  std::string element; // offending identifier/command/profile name
  std::string message;
};

std::string to_string(ViolationKind k);

// Deterministic and order-independent: permuting model sections yields the
// same violation multiset (result is canonically sorted).
std::vector<Violation> validate(const ProtocolModel& model);

// ---------------------------------------------------------------------------
// Fortifications: model rewrites whose effect the knowledge engine re-proves.
// ---------------------------------------------------------------------------

struct UnknownTarget : std::runtime_error {
  explicit UnknownTarget(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownIdentifier : std::runtime_error {
  explicit UnknownIdentifier(const std::string& name)
      : std::runtime_error("unknown identifier: '" + name + "'") {}
};

struct UnknownCommand : std::runtime_error {
  explicit UnknownCommand(const std::string& name)
      : std::runtime_error("unknown command: '" + name + "'") {}
};

// Returns a new model; the input is untouched. Preconditions: validate(model)
// is empty. Throws UnknownTarget when a toggle's rewrite target is missing.
ProtocolModel apply_fortification(const ProtocolModel& model,
                                  const std::vector<FortificationToggle>& toggles);

FortificationKind fortification_kind_from_string(const std::string& s);
std::string to_string(FortificationKind k);

// ---------------------------------------------------------------------------
// Honest exemplar values. The simulator, the fuzz planner's LegalValid
// payloads, and the attacker's initially-known values all resolve identifier
// values through this single deterministic assignment.
// ---------------------------------------------------------------------------

// Value of a non-derived identifier in an honest session. Enumerated -> first
// listed value; Range -> lo; Opaque -> seeded digest of (name, seed) truncated
// to the identifier width (widths > 64 use the low 64 bits as the value tail;
// full-width bit patterns are produced by honest_value_bits).
uint64_t honest_value(const IdentifierDef& id, uint64_t seed);

// Full-width honest bit pattern (for identifiers wider than 64 bits the
// pattern is a digest stream; for narrow ones it matches honest_value).
std::vector<uint8_t> honest_value_bytes(const IdentifierDef& id, uint64_t seed);

std::string to_string(SemanticRole r);
std::string to_string(Layer l);
std::string to_string(Direction d);
std::string to_string(Phase p);
std::string to_string(Property p);
std::string to_string(Capability c);

SemanticRole role_from_string(const std::string& s);
Layer layer_from_string(const std::string& s);
Direction direction_from_string(const std::string& s);
Phase phase_from_string(const std::string& s);
Capability capability_from_string(const std::string& s);

// Canonical digest of a model (used as provenance id by reports and plans).
std::string model_digest(const ProtocolModel& model);

} // namespace fgfuzz
