"""Module docstring with a # hash inside, never a comment."""


class Box:
    """Holds one value."""

    def get(self):
        """Return the value.

        # still part of the docstring
        """
        # unwrap and hand back
        return self.value
