#pragma once

#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

#include "blendsim/mw/messages.hpp"

namespace blendsim::mw {

class Runtime;

// Handed to an actor for the duration of one delivery.
class Context {
 public:
  Context(Runtime& rt, double now, int self) : rt_(rt), now_(now), self_(self) {}

  double now() const { return now_; }
  int self() const { return self_; }
  void send(int to, Msg msg, double delay = 0.0);

 private:
  Runtime& rt_;
  double now_;
  int self_;
};

// An isolated unit that owns its state and talks to the world only through
// messages. handle() is never reentered: the runtime delivers one envelope
// at a time across the whole system.
class Actor {
 public:
  virtual ~Actor() = default;
  virtual void handle(const Msg& msg, Context& ctx) = 0;
};

// Shared event core: envelopes ordered by (time, enqueue sequence). Delivery
// is strictly serial, so any backend that honors the order is deterministic.
class Runtime {
 public:
  virtual ~Runtime() = default;

  int add_actor(Actor* a);
  void post(int to, Msg msg, double at);
  double now() const { return now_; }
  bool idle() const { return queue_.empty(); }
  std::uint64_t delivered() const { return delivered_; }

  // Drains the queue in order; stops early once `until` returns true
  // (checked after each delivery). Simulated time never runs backwards.
  void run(const std::function<bool()>& until = {});

 protected:
  virtual void dispatch(Actor& a, const Msg& msg, Context& ctx) = 0;
  virtual void on_actor_added(int) {}

  std::vector<Actor*> actors_;

 private:
  struct Later {
    bool operator()(const Envelope& a, const Envelope& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Envelope, std::vector<Envelope>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t delivered_ = 0;
  double now_ = 0.0;
};

// Default backend: delivery happens inline on the caller's thread.
class SimScheduler : public Runtime {
 protected:
  void dispatch(Actor& a, const Msg& msg, Context& ctx) override {
    a.handle(msg, ctx);
  }
};

// One worker thread per actor, each with a blocking mailbox. The run loop
// still releases envelopes one at a time in (time, seq) order and waits for
// the worker to finish, so results are identical to SimScheduler; what the
// backend exercises is actor isolation across real threads.
class ThreadedScheduler : public Runtime {
 public:
  ~ThreadedScheduler() override;

 protected:
  void dispatch(Actor& a, const Msg& msg, Context& ctx) override;
  void on_actor_added(int id) override;

 private:
  struct Worker {
    std::thread thread;
    std::mutex m;
    std::condition_variable cv;
    const Msg* msg = nullptr;
    Context* ctx = nullptr;
    bool done = false;
    bool quit = false;
  };

  std::vector<std::unique_ptr<Worker>> workers_;
};

}  // namespace blendsim::mw
