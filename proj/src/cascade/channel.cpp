#include <iomanip>
#include <ostream>
#include <sstream>

#include "eprqkd/cascade.hpp"
#include "eprqkd/errors.hpp"

namespace eprqkd::cascade {

Pad Pad::from_seed(std::uint64_t seed, std::size_t length) {
  Rng rng(seed);
  return Pad(BitVec::random(length, rng));
}

bool PadLedger::take() {
  if (consumed_ >= pad_->size()) throw PadExhausted(consumed_, pad_->size());
  return pad_->bit(consumed_++);
}

void ChannelLog::write(std::ostream& out) const {
  for (const auto& msg : messages_) {
    out << msg.seq << ' ' << (msg.sender == Role::Alice ? "A>B" : "B>A") << ' ' << msg.kind << ' ';
    if (msg.payload.empty()) {
      out << '-';
    } else {
      std::ostringstream hex;
      hex << std::hex << std::setfill('0');
      for (auto byte : msg.payload) hex << std::setw(2) << static_cast<unsigned>(byte);
      out << hex.str();
    }
    out << " masked:" << (msg.masked ? 1 : 0) << '\n';
  }
}

std::string ChannelLog::to_string() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

void ClassicalLink::deliver(Role sender, std::string kind, std::vector<std::uint8_t> payload,
                            bool masked) {
  ChannelMessage msg{log_.size() + 1, sender, std::move(kind), std::move(payload), masked};
  log_.append(msg);
  (sender == Role::Alice ? to_bob_ : to_alice_).push_back(std::move(msg));
}

std::optional<ChannelMessage> ClassicalLink::take_for(Role receiver) {
  auto& queue = receiver == Role::Alice ? to_alice_ : to_bob_;
  if (queue.empty()) return std::nullopt;
  ChannelMessage msg = std::move(queue.front());
  queue.pop_front();
  return msg;
}

ChannelEndpoint::ChannelEndpoint(Role role, std::shared_ptr<ClassicalLink> link, PadLedger ledger)
    : role_(role), link_(std::move(link)), ledger_(std::move(ledger)) {}

void ChannelEndpoint::send(std::string kind, std::vector<std::uint8_t> payload) {
  link_->deliver(role_, std::move(kind), std::move(payload), false);
}

void ChannelEndpoint::send_masked_bit(std::string kind, bool bit) {
  const bool masked = bit != ledger_.take();
  link_->deliver(role_, std::move(kind), {static_cast<std::uint8_t>(masked)}, true);
}

void ChannelEndpoint::send_index(std::string kind, std::size_t index) {
  // 1-based, 4 bytes big-endian.
  const auto v = static_cast<std::uint32_t>(index + 1);
  send(std::move(kind), {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
                         static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)});
}

void ChannelEndpoint::send_flag(std::string kind, bool flag) {
  send(std::move(kind), {static_cast<std::uint8_t>(flag)});
}

ChannelMessage ChannelEndpoint::receive(const std::string& expected_kind) {
  auto msg = link_->take_for(role_);
  if (!msg) throw ProtocolError("no pending message (expected " + expected_kind + ")");
  if (msg->kind != expected_kind) {
    throw ProtocolError("expected message '" + expected_kind + "', got '" + msg->kind + "'");
  }
  return std::move(*msg);
}

bool ChannelEndpoint::receive_masked_bit(const std::string& kind) {
  const auto msg = receive(kind);
  if (!msg.masked || msg.payload.size() != 1) throw ProtocolError("malformed masked bit");
  return (msg.payload[0] != 0) != ledger_.take();
}

std::size_t ChannelEndpoint::receive_index(const std::string& kind) {
  const auto msg = receive(kind);
  if (msg.payload.size() != 4) throw ProtocolError("malformed index message");
  const std::uint32_t v = (std::uint32_t{msg.payload[0]} << 24) |
                          (std::uint32_t{msg.payload[1]} << 16) |
                          (std::uint32_t{msg.payload[2]} << 8) | std::uint32_t{msg.payload[3]};
  if (v == 0) throw ProtocolError("index messages are 1-based");
  return v - 1;
}

bool ChannelEndpoint::receive_flag(const std::string& kind) {
  const auto msg = receive(kind);
  if (msg.payload.size() != 1) throw ProtocolError("malformed flag message");
  return msg.payload[0] != 0;
}

const ChannelLog& ChannelEndpoint::log() const { return link_->log(); }

std::pair<ChannelEndpoint, ChannelEndpoint> make_endpoints(std::shared_ptr<const Pad> pad) {
  auto link = std::make_shared<ClassicalLink>();
  return {ChannelEndpoint(Role::Alice, link, PadLedger(pad)),
          ChannelEndpoint(Role::Bob, link, PadLedger(pad))};
}

}  // namespace eprqkd::cascade
