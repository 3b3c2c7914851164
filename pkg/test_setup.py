#!/usr/bin/env python3
"""
Check that the project dependencies and modules are importable and configured.
"""
import sys
import os
from dotenv import load_dotenv

def check_imports():
    """Check that all required modules can be imported."""
    print("Checking imports...")

    for name in ('sympy', 'requests', 'pydantic', 'pydantic_settings', 'hypothesis'):
        try:
            __import__(name)
            print(f"✓ {name} imported successfully")
        except ImportError as e:
            print(f"✗ Failed to import {name}: {e}")
            return False

    try:
        from config import config
        from rcf_engine import decompose_family
        from linear_engine import decompose_linear
        from independent_engine import decompose_independent
        from verification import SampleGrid
        print("✓ engine modules imported successfully")
    except ImportError as e:
        print(f"✗ Failed to import engine modules: {e}")
        return False

    try:
        from integrations.slack_integration import SlackIntegration
        print("✓ slack_integration module imported successfully")
    except ImportError as e:
        print(f"✗ Failed to import slack_integration: {e}")
        return False

    return True

def check_config():
    """Check configuration loading."""
    print("\nChecking configuration...")

    try:
        from config import config
        from verification import SampleGrid

        spec = config.get_default_grid(2)
        grid = SampleGrid.parse(spec)
        print(f"✓ Default grid for k=2: {spec} ({len(grid.points(2))} points)")

        print(f"✓ Max collision class: {config.engine.max_collision_class}")
        print(f"✓ Max recursion depth: {config.engine.max_recursion_depth}")
        print(f"✓ Fallback allowed: {config.engine.allow_fallback}")
        print(f"✓ Generator seed: {config.generator.seed}")
        print(f"✓ Slack enabled: {config.integrations.slack_enabled}")

        return True

    except Exception as e:
        print(f"✗ Configuration check failed: {e}")
        return False

def check_environment():
    """Check environment variables."""
    print("\nChecking environment variables...")

    load_dotenv()

    optional_vars = ['UFSS_LOG_LEVEL', 'UFSS_SLACK_WEBHOOK_URL']

    for var in optional_vars:
        value = os.getenv(var)
        if value:
            print(f"✓ {var}: {'*' * len(value)} (configured)")
        else:
            print(f"⚠ {var}: Not configured (optional)")

    return True

def main():
    """Run all checks."""
    print("UFSS Decomposition Engine - Setup Check")
    print("=" * 50)

    checks = [
        ("Import Check", check_imports),
        ("Configuration Check", check_config),
        ("Environment Check", check_environment)
    ]

    results = []

    for check_name, check_func in checks:
        try:
            result = check_func()
            results.append((check_name, result))
        except Exception as e:
            print(f"✗ {check_name} failed with exception: {e}")
            results.append((check_name, False))

    print("\n" + "=" * 50)
    print("Check Results Summary:")
    print("=" * 50)

    all_passed = True
    for check_name, result in results:
        status = "PASS" if result else "FAIL"
        print(f"{check_name}: {status}")
        if not result:
            all_passed = False

    print("\n" + "=" * 50)
    if all_passed:
        print("🎉 All checks passed! Your setup is ready.")
        print("\nNext steps:")
        print("1. Generate a corpus: python decomposition_manager.py gen --out corpus")
        print("2. Run: python decomposition_manager.py roundtrip --input corpus/instance_000.json")
        print("3. Run the test suite: pytest")
    else:
        print("❌ Some checks failed. Please check the errors above.")
        print("\nCommon fixes:")
        print("1. Install dependencies: pip install -r requirements.txt")
        print("2. Create .env file from env.example")

    return 0 if all_passed else 1

if __name__ == "__main__":
    sys.exit(main())
