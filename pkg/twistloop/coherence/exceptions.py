class ResourceCapExceeded(ValueError):
    """설정된 열거 상한 초과"""

    def __init__(self, cap_name: str, cap: int, message: str = ""):
        self.cap_name = cap_name
        self.cap = cap
        super().__init__(message or f"{cap_name} exceeded (cap={cap})")
