class EventBus:
    """Synchronous listener registry, listeners run in registration order"""

    def __init__(self):
        self.listeners = {}

    def add_listener(self, event_name, listener):
        listeners = self.listeners.setdefault(event_name, [])
        if listener not in listeners:
            listeners.append(listener)

    def remove_listener(self, event_name, listener):
        self.listeners[event_name].remove(listener)
        if len(self.listeners[event_name]) == 0:
            del self.listeners[event_name]

    def emit(self, event_name, event):
        for listener in list(self.listeners.get(event_name, [])):
            listener(event)
