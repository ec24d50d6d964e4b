from wstrata.services.managers.periods import PeriodCacheManager

__all__ = ["PeriodCacheManager"]
