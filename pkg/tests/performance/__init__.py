"""Performance tests package."""