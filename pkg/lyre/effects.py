import logging
from dataclasses import dataclass
from enum import Enum

from .errors import CoreTypeError
from .values import UNIT, ListValue, RefCell, TupleValue, display, render_value, type_name

logger = logging.getLogger(__name__)


class EffectKind(str, Enum):
    PRINT = "print"
    WIDGET_CREATE = "widget-create"
    WIDGET_CONFIGURE = "widget-configure"
    WIDGET_TOGGLE = "widget-toggle"


@dataclass(frozen=True)
class EffectEvent:
    seq: int
    kind: EffectKind
    payload: str

    def line(self):
        return f"{self.seq}\t{self.kind.value}\t{self.payload}"


class WidgetKind(str, Enum):
    FORM = "form"
    MENU = "formMenu"
    ITEM = "menuItem"


@dataclass(eq=False)
class WidgetHandle:
    kind: WidgetKind
    widget_id: int
    label: str
    action: object = None
    checked: bool = False
    # True while this item's action runs; re-entrant toggles only flip state
    dispatching: bool = False

    def __str__(self):
        return f"<{self.kind.value}#{self.widget_id}>"


# Builtins reachable by name from any program
BUILTIN_NAMES = frozenset({
    "print", "ref", "incr", "not", "fst", "snd", "string_of_int",
    "createForm", "createMenu", "createMenuItem",
    "setMenus", "setMenuItems", "setAction", "toggle",
})


class Effects:
    # Owner of everything observable in one run: the ordered trace, the core
    # store of reference cells and the stub widgets
    def __init__(self):
        self.trace = []
        self.cells = {}
        self.widgets = []

    def emit(self, kind, payload):
        # Append an event; seq numbers start at 1 and follow emission order
        event = EffectEvent(len(self.trace) + 1, kind, payload)
        self.trace.append(event)
        logger.debug("[Effect] %s", event.line())
        return event

    def printed(self):
        return [e.payload for e in self.trace if e.kind is EffectKind.PRINT]

    # ------------------------------------------------------------------
    # print and reference cells
    # ------------------------------------------------------------------
    def builtin_print(self, v):
        self.emit(EffectKind.PRINT, display(v))
        return v

    def builtin_ref(self, v):
        cell = RefCell(len(self.cells))
        self.cells[cell.cell_id] = v
        return cell

    def _cell(self, cell, op):
        if not isinstance(cell, RefCell):
            raise CoreTypeError(f"{op} expects a reference cell, got {type_name(cell)}")
        return cell

    def deref(self, cell):
        return self.cells[self._cell(cell, "!").cell_id]

    def assign(self, cell, v):
        self.cells[self._cell(cell, ":=").cell_id] = v
        return UNIT

    def incr(self, cell):
        current = self.deref(self._cell(cell, "incr"))
        if isinstance(current, bool) or not isinstance(current, int):
            raise CoreTypeError(f"incr expects an int cell, got {type_name(current)}")
        return self.assign(cell, current + 1)

    # ------------------------------------------------------------------
    # Widget stubs
    # ------------------------------------------------------------------
    def create_widget(self, kind, label):
        if not isinstance(label, str):
            raise CoreTypeError(f"create{kind.value[0].upper()}{kind.value[1:]} expects a string, got {type_name(label)}")
        handle = WidgetHandle(kind, len(self.widgets) + 1, label)
        self.widgets.append(handle)
        self.emit(EffectKind.WIDGET_CREATE, f"{kind.value} {handle.widget_id} {render_value(label)}")
        return handle

    def _expect(self, v, kind, op):
        if not isinstance(v, WidgetHandle) or v.kind is not kind:
            raise CoreTypeError(f"{op} expects a {kind.value}, got {type_name(v)}")
        return v

    def _pair(self, arg, op):
        if not isinstance(arg, TupleValue) or len(arg.items) != 2:
            raise CoreTypeError(f"{op} expects a pair, got {type_name(arg)}")
        return arg.items

    def _children(self, v, kind, op):
        if not isinstance(v, ListValue):
            raise CoreTypeError(f"{op} expects a list, got {type_name(v)}")
        return [self._expect(item, kind, op) for item in v.items]

    def set_menus(self, arg):
        form, menus = self._pair(arg, "setMenus")
        form = self._expect(form, WidgetKind.FORM, "setMenus")
        ids = [m.widget_id for m in self._children(menus, WidgetKind.MENU, "setMenus")]
        self.emit(EffectKind.WIDGET_CONFIGURE, f"setMenus {form.widget_id} {ids}")
        return UNIT

    def set_menu_items(self, arg):
        menu, items = self._pair(arg, "setMenuItems")
        menu = self._expect(menu, WidgetKind.MENU, "setMenuItems")
        ids = [i.widget_id for i in self._children(items, WidgetKind.ITEM, "setMenuItems")]
        self.emit(EffectKind.WIDGET_CONFIGURE, f"setMenuItems {menu.widget_id} {ids}")
        return UNIT

    def set_action(self, arg):
        item, action = self._pair(arg, "setAction")
        item = self._expect(item, WidgetKind.ITEM, "setAction")
        item.action = action
        self.emit(EffectKind.WIDGET_CONFIGURE, f"setAction {item.widget_id}")
        return UNIT

    def toggle(self, item, apply):
        # Flip the item and run its action, unless that action is already running
        item = self._expect(item, WidgetKind.ITEM, "toggle")
        item.checked = not item.checked
        self.emit(EffectKind.WIDGET_TOGGLE, f"{item.widget_id} {'on' if item.checked else 'off'}")
        if item.action is not None and not item.dispatching:
            item.dispatching = True
            try:
                apply(item.action, UNIT)
            finally:
                item.dispatching = False
        return UNIT

    # ------------------------------------------------------------------
    # Dispatch
    # ------------------------------------------------------------------
    def call(self, name, arg, apply):
        # Run builtin `name` on `arg`; `apply` calls back into the evaluator
        if name == "print":
            return self.builtin_print(arg)
        if name == "ref":
            return self.builtin_ref(arg)
        if name == "incr":
            return self.incr(arg)
        if name == "not":
            if not isinstance(arg, bool):
                raise CoreTypeError(f"not expects a bool, got {type_name(arg)}")
            return not arg
        if name in ("fst", "snd"):
            first, second = self._pair(arg, name)
            return first if name == "fst" else second
        if name == "string_of_int":
            if isinstance(arg, bool) or not isinstance(arg, int):
                raise CoreTypeError(f"string_of_int expects an int, got {type_name(arg)}")
            return str(arg)
        if name == "createForm":
            return self.create_widget(WidgetKind.FORM, arg)
        if name == "createMenu":
            return self.create_widget(WidgetKind.MENU, arg)
        if name == "createMenuItem":
            return self.create_widget(WidgetKind.ITEM, arg)
        if name == "setMenus":
            return self.set_menus(arg)
        if name == "setMenuItems":
            return self.set_menu_items(arg)
        if name == "setAction":
            return self.set_action(arg)
        if name == "toggle":
            return self.toggle(arg, apply)
        raise CoreTypeError(f"unknown builtin '{name}'")
