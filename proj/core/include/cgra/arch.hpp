#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cgra/opcode.hpp"

namespace cgra {

// ---------------------------------------------------------------------------
// Declarative architecture description
// ---------------------------------------------------------------------------

enum class PortDir { In, Out };

// How an FU port is wired into the datapath. Ports without an explicit role
// get one by position: in-ports become left, right, pred in declaration
// order; the first out-port is the result.
enum class PortRole { Auto, Left, Right, Pred, Result, Mem };

enum class ModuleKind { Composite, FU, RF, MU };

struct PortDecl {
  std::string name;
  PortDir dir = PortDir::In;
  int width = 0;  // 0 = architecture word width
  PortRole role = PortRole::Auto;

  friend bool operator==(const PortDecl&, const PortDecl&) = default;
};

struct InstanceDecl {
  std::string name;
  std::string module;

  friend bool operator==(const InstanceDecl&, const InstanceDecl&) = default;
};

// Endpoints are "instance.port" for a child port, or a bare "port" for a port
// of the enclosing composite.
struct Connection {
  std::string from;
  std::string to;

  friend bool operator==(const Connection&, const Connection&) = default;
};

struct ModuleDecl {
  std::string name;
  ModuleKind kind = ModuleKind::Composite;
  std::vector<PortDecl> ports;

  // FU
  std::map<Opcode, int> opcodes;  // opcode -> latency in cycles

  // RF
  int registers = 0;
  int read_ports = 1;
  int write_ports = 1;

  // MU
  int banks = 0;
  int bank_depth = 0;  // words
  int bank_width = 0;  // bits, 0 = word width

  // Composite
  std::vector<InstanceDecl> instances;
  std::vector<Connection> connections;

  const PortDecl* find_port(std::string_view port) const;

  friend bool operator==(const ModuleDecl&, const ModuleDecl&) = default;
};

struct ArchSpec {
  std::string name;
  int word_width = 32;
  int hop_limit = 1;
  int config_bytes_per_pe = 0;  // 0 = unbounded configuration memory
  int instruction_bytes = 8;
  std::vector<ModuleDecl> modules;
  std::vector<InstanceDecl> instances;
  std::vector<Connection> connections;

  const ModuleDecl* find_module(std::string_view module) const;

  // Largest II whose per-PE configuration still fits, or 0 when unbounded.
  int max_config_ii() const;

  friend bool operator==(const ArchSpec&, const ArchSpec&) = default;
};

ArchSpec parse_arch(std::string_view text);
std::string serialize_arch(const ArchSpec& spec);
ArchSpec load_arch_file(const std::string& path);

// Accepts "preset:NAME" or a filesystem path.
ArchSpec resolve_arch(const std::string& arch_ref);

std::vector<std::string> preset_names();
ArchSpec preset(std::string_view name);
// Raw JSON text of a built-in preset, exactly as shipped.
std::string preset_document(std::string_view name);

// ---------------------------------------------------------------------------
// Elaborated routing graph
// ---------------------------------------------------------------------------

enum class ResourceKind { FuSlot, InPort, OutPort, Link, Reg, MuPort };

std::string_view resource_kind_name(ResourceKind kind);

struct Resource {
  int id = 0;
  ResourceKind kind = ResourceKind::InPort;
  std::string name;
  int capacity = 1;
  int pe = -1;  // owning processing element, -1 when owned by no PE (memories)
  int fu = -1;  // FU this resource belongs to (slot, operand or result port)
};

struct FuInfo {
  std::string name;
  int pe = -1;
  int slot = -1;
  int left = -1;
  int right = -1;
  int pred = -1;
  int result = -1;
  int mem = -1;
  std::map<Opcode, int> latency;
  std::vector<int> mu_ports;  // memory ports reachable from the FU's mem port
  std::set<int> banks;        // global bank ids reachable through those ports

  bool supports(Opcode op) const { return op == Opcode::ROUTE || latency.count(op) > 0; }
  // Result latency in cycles; FU results are registered so 0 behaves as 1.
  int latency_of(Opcode op) const;
};

struct MuInfo {
  std::string name;
  int banks = 0;
  int bank_depth = 0;
  int first_bank = 0;  // global id of bank 0
  std::vector<int> ports;
};

struct PeInfo {
  std::string name;
  std::vector<int> fus;
  std::vector<int> resources;
};

namespace detail {
class Elaborator;
}

class RoutingGraph {
 public:
  std::string arch_name;
  int word_width = 32;
  int hop_limit = 1;
  int config_bytes_per_pe = 0;
  int instruction_bytes = 8;

  std::vector<Resource> resources;
  std::vector<std::vector<int>> fanout;  // resource id -> successors
  std::vector<std::vector<int>> fanin;   // resource id -> predecessors
  std::vector<FuInfo> fus;
  std::vector<MuInfo> mus;
  std::vector<PeInfo> pes;

  int find(std::string_view name) const;  // -1 if absent
  int total_banks() const;
  int bank_depth(int bank) const;
  int mu_of_bank(int bank) const;
  // Multiplexers inferred from connectivity: ports with two or more drivers.
  std::vector<int> muxes() const;
  std::vector<int> fus_supporting(Opcode op) const;

 private:
  friend class detail::Elaborator;
  std::map<std::string, int, std::less<>> by_name_;
};

RoutingGraph elaborate(const ArchSpec& spec);

}  // namespace cgra
