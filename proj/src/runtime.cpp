#include "relife/runtime.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace relife::runtime {

namespace {

constexpr std::array<std::string_view, 6> kPerformativeNames = {
    "request", "agree", "refuse", "inform", "failure", "not_understood"};
constexpr std::array<std::string_view, 4> kRoleNames = {"inspect", "recover", "redesign", "disposal"};
constexpr std::array<std::string_view, 3> kTopicNames = {"solution_request", "solution_reply",
                                                         "outcome_report"};

template <typename Enum, std::size_t N>
Enum parse_name(std::string_view s, const std::array<std::string_view, N>& names, const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  throw Error(ErrorCode::ValidationFailed, std::string("unknown ") + what + " '" + std::string(s) + "'");
}

[[noreturn]] void violation(const AclMessage& msg, const std::string& what) {
  throw Error(ErrorCode::ProtocolViolation,
              std::string(to_string(msg.performative)) + " from '" + msg.sender.name + "' to '" +
                  msg.receiver.name + "' in conversation '" + msg.conversation_id + "': " + what);
}

std::string token_key(const std::string& conversation, const std::string& token) {
  return conversation + '\x1f' + token;
}

}  // namespace

std::string_view to_string(Performative p) { return kPerformativeNames.at(static_cast<std::size_t>(p)); }
std::string_view to_string(AgentRole r) { return kRoleNames.at(static_cast<std::size_t>(r)); }
std::string_view to_string(Topic t) { return kTopicNames.at(static_cast<std::size_t>(t)); }

std::string_view to_string(ConversationState s) {
  switch (s) {
    case ConversationState::open: return "open";
    case ConversationState::awaiting_replies: return "awaiting_replies";
    case ConversationState::closed: return "closed";
  }
  return "open";
}

Performative parse_performative(std::string_view s) {
  return parse_name<Performative>(s, kPerformativeNames, "performative");
}
AgentRole parse_role(std::string_view s) { return parse_name<AgentRole>(s, kRoleNames, "agent role"); }
Topic parse_topic(std::string_view s) { return parse_name<Topic>(s, kTopicNames, "topic"); }

bool is_reply(Performative p) { return p != Performative::request; }
bool is_terminal_reply(Performative p) { return is_reply(p) && p != Performative::agree; }

std::set<std::string> Conversation::pending() const {
  std::set<std::string> names;
  for (const auto& [token, who] : open_requests) names.insert(who.name);
  return names;
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const AgentId& v) {
  j = {{"name", v.name}, {"role", to_string(v.role)}};
}

void from_json(const nlohmann::json& j, AgentId& v) {
  j.at("name").get_to(v.name);
  v.role = parse_role(j.at("role").get<std::string>());
}

void to_json(nlohmann::json& j, const AclMessage& v) {
  auto opt = [](const std::optional<std::string>& s) {
    return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
  };
  j = {{"sequence", v.sequence},
       {"performative", to_string(v.performative)},
       {"sender", v.sender},
       {"receiver", v.receiver},
       {"conversation_id", v.conversation_id},
       {"reply_with", opt(v.reply_with)},
       {"in_reply_to", opt(v.in_reply_to)},
       {"topic", to_string(v.topic)},
       {"content", v.content}};
}

void from_json(const nlohmann::json& j, AclMessage& v) {
  auto opt = [](const nlohmann::json& s) {
    return s.is_null() ? std::nullopt : std::optional<std::string>(s.get<std::string>());
  };
  j.at("sequence").get_to(v.sequence);
  v.performative = parse_performative(j.at("performative").get<std::string>());
  j.at("sender").get_to(v.sender);
  j.at("receiver").get_to(v.receiver);
  j.at("conversation_id").get_to(v.conversation_id);
  v.reply_with = opt(j.at("reply_with"));
  v.in_reply_to = opt(j.at("in_reply_to"));
  v.topic = parse_topic(j.at("topic").get<std::string>());
  v.content = j.at("content");
}

// ---------------------------------------------------------------------------

void AgentContext::send(AclMessage msg) {
  msg.sender = self_;
  system_.send(std::move(msg));
}

void AgentContext::reply(const AclMessage& to, Performative performative, Topic topic,
                         nlohmann::json content) {
  AclMessage msg;
  msg.performative = performative;
  msg.sender = self_;
  msg.receiver = to.sender;
  msg.conversation_id = to.conversation_id;
  msg.in_reply_to = to.reply_with;
  msg.topic = topic;
  msg.content = std::move(content);
  system_.send(std::move(msg));
}

// ---------------------------------------------------------------------------

void AgentSystem::register_agent(const AgentId& agent, Handler handler) {
  if (agent.name.empty()) throw Error(ErrorCode::ValidationFailed, "agent name must not be empty");
  if (agents_.count(agent.name) != 0) {
    throw Error(ErrorCode::DuplicateName, "agent name '" + agent.name + "' already registered",
                agent.name);
  }
  agents_.emplace(agent.name, Slot{agent, std::move(handler), {}, 0, 0});
  order_.push_back(agent);
}

std::optional<AgentId> AgentSystem::lookup(AgentRole role) const {
  for (const auto& id : order_) {
    if (id.role == role) return id;
  }
  return std::nullopt;
}

void AgentSystem::check_and_track(AclMessage& msg) {
  const std::uint64_t seq = next_sequence_;
  if (msg.conversation_id.empty()) violation(msg, "missing conversation_id");

  auto conv_it = conversations_.find(msg.conversation_id);
  static const std::map<std::string, std::size_t> kNoTokens;
  const auto tokens_it = tokens_.find(msg.conversation_id);
  const auto& tokens = tokens_it == tokens_.end() ? kNoTokens : tokens_it->second;
  if (msg.reply_with && tokens.count(*msg.reply_with) != 0) {
    violation(msg, "reply_with '" + *msg.reply_with + "' reused");
  }

  if (msg.performative == Performative::request) {
    if (conv_it != conversations_.end() && msg.sender != conv_it->second.initiator) {
      const auto& parts = conv_it->second.participants;
      if (std::find(parts.begin(), parts.end(), msg.sender) == parts.end()) {
        violation(msg, "sender is not part of the conversation");
      }
    }
    if (!msg.reply_with) msg.reply_with = "m" + std::to_string(seq);
    if (conv_it == conversations_.end()) {
      Conversation c;
      c.conversation_id = msg.conversation_id;
      c.initiator = msg.sender;
      conv_it = conversations_.emplace(msg.conversation_id, std::move(c)).first;
    }
    auto& conv = conv_it->second;
    if (std::find(conv.participants.begin(), conv.participants.end(), msg.receiver) ==
        conv.participants.end()) {
      conv.participants.push_back(msg.receiver);
    }
    conv.open_requests[*msg.reply_with] = msg.receiver;
    conv.state = ConversationState::awaiting_replies;
    return;
  }

  // Replies.
  if (!msg.in_reply_to) violation(msg, "reply lacks in_reply_to");
  if (conv_it == conversations_.end()) violation(msg, "unknown conversation");
  auto tok = tokens.find(*msg.in_reply_to);
  if (tok == tokens.end()) violation(msg, "in_reply_to '" + *msg.in_reply_to + "' matches no earlier message");
  AclMessage original;
  {
    std::lock_guard lock(trace_mutex_);
    original = trace_.at(tok->second);
  }
  if (original.receiver.name != msg.sender.name || original.sender.name != msg.receiver.name) {
    violation(msg, "reply does not answer a message between the same two agents");
  }
  if (!msg.reply_with) msg.reply_with = "m" + std::to_string(seq);
  if (original.performative != Performative::request) return;

  const auto key = token_key(msg.conversation_id, *msg.in_reply_to);
  if (answered_.count(key) != 0) violation(msg, "request already answered");
  auto& conv = conv_it->second;
  if (msg.performative == Performative::agree) {
    if (!agreed_.insert(key).second) violation(msg, "request already agreed");
    return;
  }
  answered_.insert(key);
  conv.open_requests.erase(*msg.in_reply_to);
  conv.replies[msg.sender.name] = msg.performative;
  if (conv.open_requests.empty()) conv.state = ConversationState::closed;
}

std::uint64_t AgentSystem::send(AclMessage msg) {
  auto receiver = agents_.find(msg.receiver.name);
  if (receiver == agents_.end()) {
    throw Error(ErrorCode::UnknownReceiver, "no agent named '" + msg.receiver.name + "'",
                msg.receiver.name);
  }
  if (agents_.count(msg.sender.name) == 0) violation(msg, "sender is not registered");
  msg.receiver = receiver->second.id;
  msg.sender = agents_.at(msg.sender.name).id;

  check_and_track(msg);

  msg.sequence = next_sequence_++;
  {
    std::lock_guard lock(trace_mutex_);
    tokens_[msg.conversation_id][*msg.reply_with] = trace_.size();
    trace_.push_back(msg);
  }
  receiver->second.sent += 1;
  receiver->second.mailbox.push_back(std::move(msg));
  return next_sequence_ - 1;
}

bool AgentSystem::step() {
  const std::size_t n = order_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t idx = (cursor_ + i) % n;
    auto& slot = agents_.at(order_[idx].name);
    if (slot.mailbox.empty()) continue;

    AclMessage msg = std::move(slot.mailbox.front());
    slot.mailbox.pop_front();
    slot.delivered += 1;
    cursor_ = (idx + 1) % n;

    AgentContext ctx(*this, slot.id);
    try {
      slot.handler(msg, ctx);
    } catch (const std::exception& e) {
      faults_.push_back({slot.id.name, msg.sequence, e.what()});
      if (msg.performative != Performative::failure &&
          msg.performative != Performative::not_understood) {
        try {
          const Topic topic =
              msg.topic == Topic::solution_request ? Topic::solution_reply : msg.topic;
          ctx.reply(msg, Performative::failure, topic, {{"error", e.what()}});
        } catch (const Error& nested) {
          faults_.push_back({slot.id.name, msg.sequence, nested.what()});
        }
      }
    }
    return true;
  }
  return false;
}

std::size_t AgentSystem::run_until_idle(std::size_t max_steps) {
  std::size_t steps = 0;
  while (steps < max_steps && step()) ++steps;
  if (!idle()) {
    throw Error(ErrorCode::BudgetExhausted,
                "agent system still busy after " + std::to_string(steps) + " steps",
                std::to_string(max_steps));
  }
  return steps;
}

std::string AgentSystem::broadcast_request(const AgentId& initiator, Topic topic,
                                           const nlohmann::json& content,
                                           const std::vector<AgentId>& recipients) {
  if (recipients.empty()) {
    throw Error(ErrorCode::ValidationFailed, "broadcast needs at least one recipient");
  }
  for (const auto& r : recipients) {
    if (agents_.count(r.name) == 0) {
      throw Error(ErrorCode::UnknownReceiver, "no agent named '" + r.name + "'", r.name);
    }
  }
  std::string id;
  do {
    char buf[32];
    std::snprintf(buf, sizeof buf, "conv-%06llu", static_cast<unsigned long long>(next_conversation_++));
    id = buf;
  } while (conversations_.count(id) != 0);
  for (const auto& r : recipients) {
    AclMessage msg;
    msg.performative = Performative::request;
    msg.sender = initiator;
    msg.receiver = r;
    msg.conversation_id = id;
    msg.topic = topic;
    msg.content = content;
    send(std::move(msg));
  }
  return id;
}

const Conversation* AgentSystem::conversation(const std::string& id) const {
  auto it = conversations_.find(id);
  return it == conversations_.end() ? nullptr : &it->second;
}

std::size_t AgentSystem::open_conversation_count() const {
  std::size_t n = 0;
  for (const auto& [id, c] : conversations_) n += c.state != ConversationState::closed ? 1 : 0;
  return n;
}

bool AgentSystem::idle() const {
  for (const auto& [name, slot] : agents_) {
    if (!slot.mailbox.empty()) return false;
  }
  return true;
}

std::size_t AgentSystem::sent_count(const std::string& name) const {
  auto it = agents_.find(name);
  return it == agents_.end() ? 0 : it->second.sent;
}

std::size_t AgentSystem::delivered_count(const std::string& name) const {
  auto it = agents_.find(name);
  return it == agents_.end() ? 0 : it->second.delivered;
}

std::vector<AclMessage> AgentSystem::trace() const {
  std::lock_guard lock(trace_mutex_);
  return trace_;
}

std::string AgentSystem::trace_jsonl() const { return to_jsonl(trace()); }

std::string to_jsonl(const std::vector<AclMessage>& trace) {
  std::string out;
  for (const auto& m : trace) {
    out += nlohmann::json(m).dump();
    out += '\n';
  }
  return out;
}

std::vector<std::string> check_conformance(const std::vector<AclMessage>& trace) {
  std::vector<std::string> violations;
  // conversation -> reply_with -> message
  std::map<std::string, std::map<std::string, const AclMessage*>> seen;
  std::uint64_t last = 0;
  for (const auto& m : trace) {
    const auto where = "message " + std::to_string(m.sequence);
    if (m.sequence <= last) violations.push_back(where + ": sequence not strictly increasing");
    last = m.sequence;
    if (is_reply(m.performative)) {
      if (!m.in_reply_to) {
        violations.push_back(where + ": reply without in_reply_to");
      } else {
        const auto& conv = seen[m.conversation_id];
        auto it = conv.find(*m.in_reply_to);
        if (it == conv.end()) {
          violations.push_back(where + ": in_reply_to '" + *m.in_reply_to +
                               "' does not resolve to an earlier message of the conversation");
        } else if (it->second->receiver.name != m.sender.name) {
          violations.push_back(where + ": replies to a message addressed to someone else");
        }
      }
    }
    if (m.reply_with) seen[m.conversation_id][*m.reply_with] = &m;
  }
  return violations;
}

}  // namespace relife::runtime
