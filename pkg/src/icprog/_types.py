"""Term representation shared by the pure-Python and compiled kernels.

Variables are ``str`` subclasses and compound terms are ``(functor, args)``
tuple subclasses, so equality and hashing run at C speed in both kernels.
Constants are compounds with an empty argument tuple.
"""


class Var(str):
    __slots__ = ()

    def __repr__(self):
        return str.__str__(self)


class Struct(tuple):
    __slots__ = ()

    def __new__(cls, functor, args=()):
        return tuple.__new__(cls, (functor, tuple(args)))

    @property
    def functor(self):
        return self[0]

    @property
    def args(self):
        return self[1]

    @property
    def arity(self):
        return len(self[1])

    def __repr__(self):
        from .pretty import format_term

        return format_term(self)


NIL = Struct("[]")
CONS = "."
