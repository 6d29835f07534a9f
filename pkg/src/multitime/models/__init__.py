"""Economic models built on diagonal recurrences."""
