from setuptools import setup

import io
import os


here = os.path.abspath(os.path.dirname(__file__))


def read(*filenames, **kwargs):
    encoding = kwargs.get('encoding', 'utf-8')
    sep = kwargs.get('sep', '\n')
    buf = []
    for filename in filenames:
        with io.open(os.path.join(here, filename), encoding=encoding) as f:
            buf.append(f.read())
    return sep.join(buf)


long_description = read('README.md')


setup(
    name='pytrajlab',
    version='0.1.0',
    license='BSD License',
    author='pytrajlab contributors',
    tests_require=['pytest>=3.0.5'],
    install_requires=['numpy>=1.17', 'scipy>=1.6'],
    python_requires='>=3.9',
    description='Generate, profile, cluster and evaluate pedestrian trajectory datasets',
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=['trajlab'],
    package_data={'trajlab': ['data/*.json']},
    include_package_data=True,
    platforms='any',
    test_suite='trajlab.test',
    entry_points={
        'console_scripts': ['trajlab=trajlab._cli:main'],
    },
    classifiers=[
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Development Status :: 3 - Alpha',
        'Natural Language :: English',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering',
    ],
    extras_require={
        'testing': ['pytest'],
    }
)
