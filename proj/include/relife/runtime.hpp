#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relife/error.hpp"

namespace relife::runtime {

enum class Performative { request, agree, refuse, inform, failure, not_understood };
enum class AgentRole { inspect, recover, redesign, disposal };
enum class Topic { solution_request, solution_reply, outcome_report };

std::string_view to_string(Performative p);
std::string_view to_string(AgentRole r);
std::string_view to_string(Topic t);
Performative parse_performative(std::string_view s);
AgentRole parse_role(std::string_view s);
Topic parse_topic(std::string_view s);

/// True for every performative that answers an earlier message.
bool is_reply(Performative p);
/// Replies that settle a request (everything except agree).
bool is_terminal_reply(Performative p);

struct AgentId {
  std::string name;
  AgentRole role = AgentRole::inspect;

  auto operator<=>(const AgentId&) const = default;
};

struct AclMessage {
  Performative performative = Performative::request;
  AgentId sender;
  AgentId receiver;
  std::string conversation_id;
  std::optional<std::string> reply_with;
  std::optional<std::string> in_reply_to;
  Topic topic = Topic::solution_request;
  nlohmann::json content;
  /// Assigned by the bus on send.
  std::uint64_t sequence = 0;

  bool operator==(const AclMessage&) const = default;
};

void to_json(nlohmann::json& j, const AgentId& v);
void from_json(const nlohmann::json& j, AgentId& v);
void to_json(nlohmann::json& j, const AclMessage& v);
void from_json(const nlohmann::json& j, AclMessage& v);

enum class ConversationState { open, awaiting_replies, closed };
std::string_view to_string(ConversationState s);

struct Conversation {
  std::string conversation_id;
  AgentId initiator;
  std::vector<AgentId> participants;
  ConversationState state = ConversationState::open;
  /// Open requests keyed by their reply_with token.
  std::map<std::string, AgentId> open_requests;
  /// Terminal performative each participant answered with.
  std::map<std::string, Performative> replies;

  std::set<std::string> pending() const;
};

class AgentSystem;

/// What a handler sees of the system while it processes one message.
class AgentContext {
 public:
  AgentContext(AgentSystem& system, const AgentId& self) : system_(system), self_(self) {}

  const AgentId& self() const { return self_; }
  /// Sends with `self` as sender.
  void send(AclMessage msg);
  void reply(const AclMessage& to, Performative performative, Topic topic,
             nlohmann::json content = nlohmann::json::object());

 private:
  AgentSystem& system_;
  AgentId self_;
};

using Handler = std::function<void(const AclMessage&, AgentContext&)>;

struct HandlerFault {
  std::string agent;
  std::uint64_t message_sequence = 0;
  std::string what;
};

/// Cooperative, single-threaded message bus. All state changes happen in
/// send() and step(); the trace may be snapshotted from any thread.
class AgentSystem {
 public:
  AgentSystem() = default;
  AgentSystem(const AgentSystem&) = delete;
  AgentSystem& operator=(const AgentSystem&) = delete;

  /// Throws DuplicateName.
  void register_agent(const AgentId& agent, Handler handler);
  const std::vector<AgentId>& directory() const { return order_; }
  std::optional<AgentId> lookup(AgentRole role) const;
  bool is_registered(const std::string& name) const { return agents_.count(name) != 0; }

  /// Throws UnknownReceiver, ProtocolViolation. Returns the assigned sequence.
  std::uint64_t send(AclMessage msg);

  /// Lets the next agent in round-robin order with a non-empty mailbox
  /// process one message. False iff every mailbox is empty.
  bool step();

  /// Steps until idle. Throws BudgetExhausted if work remains after
  /// max_steps steps.
  std::size_t run_until_idle(std::size_t max_steps);

  /// One request per recipient under a fresh conversation id.
  std::string broadcast_request(const AgentId& initiator, Topic topic, const nlohmann::json& content,
                                const std::vector<AgentId>& recipients);

  const Conversation* conversation(const std::string& id) const;
  const std::map<std::string, Conversation>& conversations() const { return conversations_; }
  std::size_t open_conversation_count() const;

  bool idle() const;
  std::size_t sent_count(const std::string& name) const;
  std::size_t delivered_count(const std::string& name) const;
  const std::vector<HandlerFault>& faults() const { return faults_; }

  std::vector<AclMessage> trace() const;
  /// One message per line in sequence order.
  std::string trace_jsonl() const;

 private:
  struct Slot {
    AgentId id;
    Handler handler;
    std::deque<AclMessage> mailbox;
    std::size_t sent = 0;
    std::size_t delivered = 0;
  };

  void check_and_track(AclMessage& msg);

  std::map<std::string, Slot> agents_;
  std::vector<AgentId> order_;
  std::size_t cursor_ = 0;
  std::uint64_t next_sequence_ = 1;
  std::uint64_t next_conversation_ = 1;
  std::map<std::string, Conversation> conversations_;
  // conversation id -> reply_with token -> trace index
  std::map<std::string, std::map<std::string, std::size_t>> tokens_;
  std::set<std::string> answered_;
  std::set<std::string> agreed_;
  std::vector<HandlerFault> faults_;

  mutable std::mutex trace_mutex_;
  std::vector<AclMessage> trace_;
};

/// Bus-level conformance monitor over a full trace: sequence numbers
/// strictly increase and every reply's in_reply_to names an earlier message
/// of the same conversation sent to the replier. Returns violations.
std::vector<std::string> check_conformance(const std::vector<AclMessage>& trace);

std::string to_jsonl(const std::vector<AclMessage>& trace);

}  // namespace relife::runtime
